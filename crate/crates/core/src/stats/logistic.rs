//! Monotone 4-parameter logistic mapping from objective scores to subjective
//! scores, fitted by damped Gauss-Newton least squares.
//!
//! f(x) = b2 + (b1 - b2) / (1 + exp(-(x - b3) / |b4|))
//!
//! Initialization: b1 = max(target), b2 = min(target), b3 = median(pred),
//! b4 = std(pred)/4; at most 200 iterations with step tolerance 1e-8. Each
//! iteration also tries a closed-form candidate that embeds the data's OLS
//! line with a doubled linear window, which lets near-linear data escape the
//! flat-curvature ridge instead of crawling along it.

use serde::{Deserialize, Serialize};

use super::metrics::median;
use crate::error::{Error, Result};

const MAX_ITER: usize = 200;
const STEP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
    pub converged: bool,
    /// Final sum of squared residuals.
    pub residual: f64,
}

impl LogisticFit {
    pub fn apply(&self, x: f64) -> f64 {
        eval(&[self.beta1, self.beta2, self.beta3, self.beta4], x)
    }
}

#[inline]
fn eval(p: &[f64; 4], x: f64) -> f64 {
    p[1] + (p[0] - p[1]) / (1.0 + (-(x - p[2]) / p[3].abs()).exp())
}

fn sse(p: &[f64; 4], x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| {
            let r = eval(p, a) - b;
            r * r
        })
        .sum()
}

/// Fit the logistic map from `pred` to `target`.
pub fn fit_logistic(pred: &[f64], target: &[f64]) -> Result<LogisticFit> {
    if pred.len() != target.len() {
        return Err(Error::Dimension(format!(
            "{} predictions against {} targets",
            pred.len(),
            target.len()
        )));
    }
    if pred.len() < 5 {
        return Err(Error::Input(format!(
            "logistic fit needs at least 5 points, got {}",
            pred.len()
        )));
    }
    if pred.iter().chain(target).any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite value in logistic fit input".into()));
    }
    if pred.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::DegenerateInput(
            "logistic fit on constant predictions".into(),
        ));
    }

    let n = pred.len() as f64;
    let mean_x = pred.iter().sum::<f64>() / n;
    let std_x = (pred.iter().map(|&v| (v - mean_x) * (v - mean_x)).sum::<f64>() / n).sqrt();
    let b1 = target.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let b2 = target.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut p = [b1, b2, median(pred), if std_x > 0.0 { std_x / 4.0 } else { 1.0 }];

    // OLS line of (pred, target) for the linear-regime candidate jumps
    let mean_y = target.iter().sum::<f64>() / n;
    let sxx = pred.iter().map(|&v| (v - mean_x) * (v - mean_x)).sum::<f64>();
    let slope = if sxx > 0.0 {
        pred.iter()
            .zip(target)
            .map(|(&a, &b)| (a - mean_x) * (b - mean_y))
            .sum::<f64>()
            / sxx
    } else {
        0.0
    };

    let mut current_sse = sse(&p, pred, target);
    let mut lambda = 1e-3;
    let mut converged = false;

    for _ in 0..MAX_ITER {
        // residuals and jacobian
        let mut jtj = [[0.0f64; 4]; 4];
        let mut jtr = [0.0f64; 4];
        let a4 = p[3].abs();
        for (&x, &y) in pred.iter().zip(target) {
            let u = (x - p[2]) / a4;
            let s = 1.0 / (1.0 + (-u).exp());
            let ds = s * (1.0 - s);
            let r = p[1] + (p[0] - p[1]) * s - y;
            let grad = [
                s,
                1.0 - s,
                -(p[0] - p[1]) * ds / a4,
                -(p[0] - p[1]) * ds * (x - p[2]) / (a4 * a4) * p[3].signum(),
            ];
            for i in 0..4 {
                jtr[i] += grad[i] * r;
                for j in 0..4 {
                    jtj[i][j] += grad[i] * grad[j];
                }
            }
        }

        // damped step with retry on failure
        let mut candidate = None;
        for _ in 0..30 {
            let mut m = jtj;
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += lambda * row[i].max(1e-12);
            }
            if let Some(step) = solve4(&m, &jtr) {
                let trial = [
                    p[0] - step[0],
                    p[1] - step[1],
                    p[2] - step[2],
                    p[3] - step[3],
                ];
                if trial[3] != 0.0 {
                    let trial_sse = sse(&trial, pred, target);
                    if trial_sse <= current_sse {
                        candidate = Some((trial, trial_sse));
                        break;
                    }
                }
            }
            lambda *= 10.0;
        }
        let Some((mut next, mut next_sse)) = candidate else {
            break;
        };

        // linear-regime candidate: widen the window along the OLS line
        if slope != 0.0 {
            let b4c = next[3].abs() * 2.0;
            let mid = mean_y;
            let jump = [
                mid + 2.0 * slope * b4c,
                mid - 2.0 * slope * b4c,
                mean_x,
                b4c,
            ];
            let jump_sse = sse(&jump, pred, target);
            if jump_sse < next_sse * (1.0 - 1e-10) {
                next = jump;
                next_sse = jump_sse;
            }
        }

        let step_norm = (0..4)
            .map(|i| (next[i] - p[i]) * (next[i] - p[i]))
            .sum::<f64>()
            .sqrt();
        let p_norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        p = next;
        current_sse = next_sse;
        lambda = (lambda * 0.1).max(1e-12);
        if step_norm < STEP_TOL * (1.0 + p_norm) {
            converged = true;
            break;
        }
    }

    Ok(LogisticFit {
        beta1: p[0],
        beta2: p[1],
        beta3: p[2],
        beta4: p[3].abs(),
        converged,
        residual: current_sse,
    })
}

/// Gaussian elimination with partial pivoting for the 4x4 normal equations.
fn solve4(m: &[[f64; 4]; 4], rhs: &[f64; 4]) -> Option<[f64; 4]> {
    let mut a = *m;
    let mut b = *rhs;
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for col in (0..4).rev() {
        let mut acc = b[col];
        for k in col + 1..4 {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}
