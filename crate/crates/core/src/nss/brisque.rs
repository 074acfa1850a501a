//! BRISQUE-style per-frame features: GGD on MSCN plus AGGD on the four
//! paired products, at the native scale and a 2x decimated scale.
//!
//! Feature order per scale: ggd_alpha, ggd_sigma_sq, then for each of
//! h/v/d1/d2: nu, eta, sigma_l_sq, sigma_r_sq. Scale 1 first, then scale 2 —
//! 36 values per frame. Flat planes return the canonical degenerate vector
//! (alphas 2, everything else 0) rather than erroring; the same rule is
//! applied per sub-fit when a product array is one-sided.

use super::fits::{fit_aggd, fit_ggd};
use super::mscn::mscn;
use crate::error::{Error, Result};
use crate::video::PixelPlane;

pub const BRISQUE_FEATURE_COUNT: usize = 36;
const VAR_FLOOR: f64 = 1e-8;

pub(crate) const ORIENTATIONS: [&str; 4] = ["h", "v", "d1", "d2"];

/// 2x bilinear decimation (mean of each 2x2 block).
pub fn downsample_half(plane: &PixelPlane) -> PixelPlane {
    let (w, h) = (plane.width() / 2, plane.height() / 2);
    PixelPlane::from_fn(w, h, |row, col| {
        (plane.at(2 * row, 2 * col)
            + plane.at(2 * row, 2 * col + 1)
            + plane.at(2 * row + 1, 2 * col)
            + plane.at(2 * row + 1, 2 * col + 1))
            / 4.0
    })
}

fn paired_products(m: &PixelPlane) -> [Vec<f64>; 4] {
    let (w, h) = (m.width(), m.height());
    let mut hp = Vec::with_capacity((w - 1) * h);
    let mut vp = Vec::with_capacity(w * (h - 1));
    let mut d1 = Vec::with_capacity((w - 1) * (h - 1));
    let mut d2 = Vec::with_capacity((w - 1) * (h - 1));
    for row in 0..h {
        for col in 0..w {
            let v = m.at(row, col);
            if col + 1 < w {
                hp.push(v * m.at(row, col + 1));
            }
            if row + 1 < h {
                vp.push(v * m.at(row + 1, col));
            }
            if row + 1 < h && col + 1 < w {
                d1.push(v * m.at(row + 1, col + 1));
            }
            if row + 1 < h && col > 0 {
                d2.push(v * m.at(row + 1, col - 1));
            }
        }
    }
    [hp, vp, d1, d2]
}

fn variance(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

fn one_sided_mean_sq(samples: &[f64], negative: bool) -> f64 {
    let mut acc = 0.0;
    let mut n = 0usize;
    for &v in samples {
        if (negative && v < 0.0) || (!negative && v > 0.0) {
            acc += v * v;
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        acc / n as f64
    }
}

/// GGD(2) + 4x AGGD(4) on one already-normalized coefficient plane.
pub(crate) fn scale_features(m: &PixelPlane, out: &mut Vec<f64>) {
    if variance(m.samples()) <= VAR_FLOOR {
        out.push(2.0);
        out.push(0.0);
        for _ in ORIENTATIONS {
            out.extend_from_slice(&[2.0, 0.0, 0.0, 0.0]);
        }
        return;
    }
    match fit_ggd(m.samples()) {
        Ok(fit) => {
            out.push(fit.alpha);
            out.push(fit.sigma * fit.sigma);
        }
        Err(_) => {
            out.push(2.0);
            out.push(0.0);
        }
    }
    for products in paired_products(m) {
        match fit_aggd(&products) {
            Ok(fit) => {
                out.push(fit.nu);
                out.push(fit.eta);
                out.push(fit.sigma_l * fit.sigma_l);
                out.push(fit.sigma_r * fit.sigma_r);
            }
            Err(_) => {
                // one-sided products: keep the measured one-sided energies
                out.push(2.0);
                out.push(0.0);
                out.push(one_sided_mean_sq(&products, true));
                out.push(one_sided_mean_sq(&products, false));
            }
        }
    }
}

/// Single-scale variant (18 values) used for temporal difference planes.
pub fn brisque_single_scale(plane: &PixelPlane) -> Result<Vec<f64>> {
    if plane.width() < 7 || plane.height() < 7 {
        return Err(Error::Dimension(format!(
            "single-scale features need at least 7x7, got {}x{}",
            plane.width(),
            plane.height()
        )));
    }
    let mut out = Vec::with_capacity(18);
    if variance(plane.samples()) <= VAR_FLOOR {
        out.push(2.0);
        out.push(0.0);
        for _ in ORIENTATIONS {
            out.extend_from_slice(&[2.0, 0.0, 0.0, 0.0]);
        }
        return Ok(out);
    }
    scale_features(&mscn(plane)?, &mut out);
    Ok(out)
}

/// The 36 BRISQUE features of one plane in [0, 255].
pub fn brisque_frame_features(plane: &PixelPlane) -> Result<Vec<f64>> {
    if plane.width() < 14 || plane.height() < 14 {
        return Err(Error::Dimension(format!(
            "BRISQUE features need at least 14x14, got {}x{}",
            plane.width(),
            plane.height()
        )));
    }
    let mut out = Vec::with_capacity(BRISQUE_FEATURE_COUNT);
    if variance(plane.samples()) <= VAR_FLOOR {
        for _ in 0..2 {
            out.push(2.0);
            out.push(0.0);
            for _ in ORIENTATIONS {
                out.extend_from_slice(&[2.0, 0.0, 0.0, 0.0]);
            }
        }
        return Ok(out);
    }
    scale_features(&mscn(plane)?, &mut out);
    let half = downsample_half(plane);
    scale_features(&mscn(&half)?, &mut out);
    Ok(out)
}
