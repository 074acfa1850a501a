//! Moment-matching fits of the (asymmetric) generalized Gaussian model to
//! bandpass coefficient samples.
//!
//! Both fits search the shape parameter on the grid [0.2, 10] with step
//! 0.001 against the precomputed gamma-ratio table
//! rho(nu) = gamma(2/nu)^2 / (gamma(1/nu) * gamma(3/nu)).

use once_cell::sync::Lazy;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

const GRID_START: f64 = 0.2;
const GRID_STEP: f64 = 0.001;
const GRID_LEN: usize = 9801; // covers [0.2, 10.0]
const MIN_SAMPLES: usize = 100;
const VAR_FLOOR: f64 = 1e-8;

/// Generalized Gaussian fit: shape `alpha`, scale `sigma` (RMS of samples).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GgdFit {
    pub alpha: f64,
    pub sigma: f64,
}

/// Asymmetric generalized Gaussian fit: shape `nu`, one-sided RMS scales,
/// and mean offset `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggdFit {
    pub nu: f64,
    pub sigma_l: f64,
    pub sigma_r: f64,
    pub eta: f64,
}

static RHO_GRID: Lazy<Vec<(f64, f64)>> = Lazy::new(|| {
    (0..GRID_LEN)
        .map(|i| {
            let nu = GRID_START + GRID_STEP * i as f64;
            let rho = gamma(2.0 / nu).powi(2) / (gamma(1.0 / nu) * gamma(3.0 / nu));
            (nu, rho)
        })
        .collect()
});

fn grid_argmin(target: f64) -> f64 {
    let mut best = (f64::INFINITY, GRID_START);
    for &(nu, rho) in RHO_GRID.iter() {
        let d = (rho - target).abs();
        if d < best.0 {
            best = (d, nu);
        }
    }
    best.1
}

/// Fit a zero-mean GGD by matching (mean |x|)^2 / mean(x^2) to the
/// gamma-ratio grid.
pub fn fit_ggd(samples: &[f64]) -> Result<GgdFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::DegenerateInput(format!(
            "GGD fit needs at least {} samples, got {}",
            MIN_SAMPLES,
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mean_sq = samples.iter().map(|v| v * v).sum::<f64>() / n;
    let mean = samples.iter().sum::<f64>() / n;
    if mean_sq - mean * mean <= VAR_FLOOR {
        return Err(Error::DegenerateInput(
            "GGD fit on (near-)constant samples".into(),
        ));
    }
    let mean_abs = samples.iter().map(|v| v.abs()).sum::<f64>() / n;
    let rho = mean_abs * mean_abs / mean_sq;
    Ok(GgdFit {
        alpha: grid_argmin(rho),
        sigma: mean_sq.sqrt(),
    })
}

/// Fit an AGGD by one-sided second moments and the generalized gamma ratio.
pub fn fit_aggd(samples: &[f64]) -> Result<AggdFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::DegenerateInput(format!(
            "AGGD fit needs at least {} samples, got {}",
            MIN_SAMPLES,
            samples.len()
        )));
    }
    let mut left_sq = 0.0;
    let mut left_n = 0usize;
    let mut right_sq = 0.0;
    let mut right_n = 0usize;
    for &v in samples {
        if v < 0.0 {
            left_sq += v * v;
            left_n += 1;
        } else if v > 0.0 {
            right_sq += v * v;
            right_n += 1;
        }
    }
    if left_n == 0 || right_n == 0 {
        return Err(Error::DegenerateInput(
            "AGGD fit needs both negative and positive samples".into(),
        ));
    }
    let sigma_l = (left_sq / left_n as f64).sqrt();
    let sigma_r = (right_sq / right_n as f64).sqrt();
    let n = samples.len() as f64;
    let mean_abs = samples.iter().map(|v| v.abs()).sum::<f64>() / n;
    let mean_sq = samples.iter().map(|v| v * v).sum::<f64>() / n;
    let gamma_hat = sigma_l / sigma_r;
    let r_hat = mean_abs * mean_abs / mean_sq;
    let r_norm = r_hat * (gamma_hat.powi(3) + 1.0) * (gamma_hat + 1.0)
        / (gamma_hat * gamma_hat + 1.0).powi(2);
    let nu = grid_argmin(r_norm);
    let eta = (sigma_r - sigma_l) * gamma(2.0 / nu) / gamma(1.0 / nu);
    Ok(AggdFit {
        nu,
        sigma_l,
        sigma_r,
        eta,
    })
}
