//! Mean-subtracted contrast-normalized coefficients.
//!
//! Local mean and deviation come from a 7x7 Gaussian window (std 7/6,
//! unit sum) with half-sample symmetric border extension; the stabilizing
//! constant is C = 1 on the [0, 255] sample scale.

use crate::error::{Error, Result};
use crate::video::PixelPlane;

const RADIUS: usize = 3;
const C: f64 = 1.0;

fn gaussian_taps() -> [f64; 2 * RADIUS + 1] {
    let sigma = 7.0 / 6.0;
    let mut taps = [0.0; 2 * RADIUS + 1];
    let mut sum = 0.0;
    for (i, tap) in taps.iter_mut().enumerate() {
        let x = i as f64 - RADIUS as f64;
        *tap = (-x * x / (2.0 * sigma * sigma)).exp();
        sum += *tap;
    }
    for tap in taps.iter_mut() {
        *tap /= sum;
    }
    taps
}

// half-sample symmetric: ...2 1 0 | 0 1 2 ... n-1 | n-1 n-2...
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - i - 1;
        } else {
            return i as usize;
        }
    }
}

fn convolve_separable(plane: &PixelPlane, taps: &[f64]) -> PixelPlane {
    let (w, h) = (plane.width(), plane.height());
    let r = taps.len() / 2;
    // horizontal pass
    let mut tmp = vec![0.0; w * h];
    for row in 0..h {
        for col in 0..w {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                let src = reflect(col as isize + k as isize - r as isize, w);
                acc += t * plane.at(row, src);
            }
            tmp[row * w + col] = acc;
        }
    }
    // vertical pass
    let mut out = vec![0.0; w * h];
    for row in 0..h {
        for col in 0..w {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                let src = reflect(row as isize + k as isize - r as isize, h);
                acc += t * tmp[src * w + col];
            }
            out[row * w + col] = acc;
        }
    }
    PixelPlane::new(w, h, out).unwrap()
}

/// (I - mu) / (sigma + 1) with Gaussian-weighted local statistics.
pub fn mscn(plane: &PixelPlane) -> Result<PixelPlane> {
    let (w, h) = (plane.width(), plane.height());
    if w < 7 || h < 7 {
        return Err(Error::Dimension(format!(
            "MSCN needs at least 7x7, got {}x{}",
            w, h
        )));
    }
    let taps = gaussian_taps();
    let mu = convolve_separable(plane, &taps);
    let sq = plane.map(|v| v * v);
    let musq = convolve_separable(&sq, &taps);
    let mut out = Vec::with_capacity(w * h);
    for i in 0..w * h {
        let m = mu.samples()[i];
        let var = (musq.samples()[i] - m * m).max(0.0);
        out.push((plane.samples()[i] - m) / (var.sqrt() + C));
    }
    PixelPlane::new(w, h, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn window_is_unit_sum() {
        let taps = gaussian_taps();
        assert!((taps.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((taps[0] - taps[6]).abs() < 1e-15);
    }

    #[test]
    fn constant_plane_normalizes_to_zero() {
        let out = mscn(&PixelPlane::constant(16, 16, 200.0)).unwrap();
        assert!(out.samples().iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn small_plane_is_rejected() {
        assert!(matches!(
            mscn(&PixelPlane::constant(6, 10, 0.0)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn white_noise_mscn_is_near_zero_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let plane = PixelPlane::from_fn(256, 256, |_, _| rng.random_range(0.0..255.0));
        let out = mscn(&plane).unwrap();
        let mean = out.samples().iter().sum::<f64>() / out.samples().len() as f64;
        assert!(mean.abs() < 0.05, "mean = {mean}");
    }

    #[test]
    fn near_invariant_to_doubling_where_contrast_dominates() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let plane = PixelPlane::from_fn(64, 64, |_, _| rng.random_range(0.0..120.0));
        let doubled = plane.map(|v| v * 2.0);
        let a = mscn(&plane).unwrap();
        let b = mscn(&doubled).unwrap();
        // recover the local deviation to mask out pixels where C dominates
        let taps = gaussian_taps();
        let mu = convolve_separable(&plane, &taps);
        let musq = convolve_separable(&plane.map(|v| v * v), &taps);
        let mut checked = 0;
        for i in 0..a.samples().len() {
            let m = mu.samples()[i];
            let sigma = (musq.samples()[i] - m * m).max(0.0).sqrt();
            if sigma >= 25.0 && a.samples()[i].abs() <= 1.0 {
                assert!(
                    (a.samples()[i] - b.samples()[i]).abs() <= 0.02,
                    "delta = {}",
                    (a.samples()[i] - b.samples()[i]).abs()
                );
                checked += 1;
            }
        }
        assert!(checked > 1000, "mask kept only {checked} pixels");
    }
}
