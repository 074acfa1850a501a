//! Epsilon-insensitive support vector regression with an RBF kernel, solved
//! by a from-scratch SMO working-pair solver.

mod grid;
mod solver;

pub use grid::{grid_search_train, GridSearchReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MODEL_VERSION: u32 = 1;

/// Per-dimension (min, max) observed on training data; scales features into
/// [-1, 1], with zero-width dimensions mapped to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl ScalerParams {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows
            .first()
            .ok_or_else(|| Error::Input("cannot fit a scaler on no rows".into()))?
            .len();
        let mut mins = vec![f64::INFINITY; dim];
        let mut maxs = vec![f64::NEG_INFINITY; dim];
        for row in rows {
            if row.len() != dim {
                return Err(Error::Dimension(format!(
                    "row of width {} in a {}-column matrix",
                    row.len(),
                    dim
                )));
            }
            for (d, &v) in row.iter().enumerate() {
                mins[d] = mins[d].min(v);
                maxs[d] = maxs[d].max(v);
            }
        }
        Ok(ScalerParams { mins, maxs })
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mins.iter().zip(&self.maxs))
            .map(|(&v, (&lo, &hi))| {
                if hi > lo {
                    2.0 * (v - lo) / (hi - lo) - 1.0
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.mins.len()
    }
}

/// Solver hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub tol: f64,
    pub max_passes: usize,
}

impl SvrParams {
    /// C = 1, epsilon = 0.1, gamma = 1/d, tol = 1e-3, max_passes = 10n.
    pub fn defaults(n_samples: usize, n_features: usize) -> Self {
        SvrParams {
            c: 1.0,
            epsilon: 0.1,
            gamma: 1.0 / n_features.max(1) as f64,
            tol: 1e-3,
            max_passes: 10 * n_samples.max(1),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !(self.gamma > 0.0) || !(self.tol > 0.0) {
            return Err(Error::Input(
                "C, gamma and tol must all be positive".into(),
            ));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::Input("epsilon must be non-negative".into()));
        }
        if self.max_passes == 0 {
            return Err(Error::Input("max_passes must be positive".into()));
        }
        Ok(())
    }
}

/// Solver-side facts recorded with every trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrDiagnostics {
    pub converged: bool,
    pub iterations: usize,
    pub degenerate_identical_rows: bool,
}

/// A trained epsilon-SVR: support vectors (scaled), dual coefficients
/// beta_k = alpha_k - alpha*_k, bias, and the fitted scaler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub version: u32,
    pub feature_names: Vec<String>,
    pub scaler: ScalerParams,
    pub params: SvrParams,
    pub support_vectors: Vec<Vec<f64>>,
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub diagnostics: SvrDiagnostics,
}

/// exp(-gamma * ||x - z||^2).
pub fn rbf_kernel(x: &[f64], z: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != z.len() {
        return Err(Error::Dimension(format!(
            "kernel arguments of length {} and {}",
            x.len(),
            z.len()
        )));
    }
    Ok((-gamma * sq_dist(x, z)).exp())
}

#[inline]
pub(crate) fn sq_dist(x: &[f64], z: &[f64]) -> f64 {
    x.iter()
        .zip(z)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<f64>()
}

/// Train on raw (unscaled) rows. The scaler is fitted on `x` first; the
/// solver then runs on scaled inputs.
pub fn svr_train(
    x: &[Vec<f64>],
    y: &[f64],
    feature_names: &[String],
    params: &SvrParams,
    seed: u64,
) -> Result<SvrModel> {
    params.validate()?;
    if x.len() < 2 {
        return Err(Error::Input(format!(
            "training needs at least 2 samples, got {}",
            x.len()
        )));
    }
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "{} rows but {} targets",
            x.len(),
            y.len()
        )));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("training data contains non-finite values".into()));
    }
    let dim = x[0].len();
    if feature_names.len() != dim {
        return Err(Error::Schema(format!(
            "{} feature names for {}-column data",
            feature_names.len(),
            dim
        )));
    }
    let scaler = ScalerParams::fit(x)?;
    let scaled: Vec<Vec<f64>> = x.iter().map(|row| scaler.transform(row)).collect();

    let identical_rows = scaled.iter().all(|r| r == &scaled[0]);
    let spread = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - y.iter().cloned().fold(f64::INFINITY, f64::min);
    let degenerate = identical_rows && spread > 2.0 * params.epsilon;

    let solution = solver::solve(&scaled, y, params, seed);

    let mut support_vectors = Vec::new();
    let mut dual_coefs = Vec::new();
    for (row, &beta) in scaled.iter().zip(&solution.beta) {
        if beta != 0.0 {
            support_vectors.push(row.clone());
            dual_coefs.push(beta);
        }
    }
    Ok(SvrModel {
        version: MODEL_VERSION,
        feature_names: feature_names.to_vec(),
        scaler,
        params: params.clone(),
        support_vectors,
        dual_coefs,
        bias: solution.bias,
        diagnostics: SvrDiagnostics {
            converged: solution.converged,
            iterations: solution.iterations,
            degenerate_identical_rows: degenerate,
        },
    })
}

impl SvrModel {
    /// Predict from a raw feature vector in this model's column order.
    pub fn predict(&self, raw: &[f64]) -> Result<f64> {
        if raw.len() != self.scaler.dim() {
            return Err(Error::Schema(format!(
                "vector of length {} against a {}-feature model",
                raw.len(),
                self.scaler.dim()
            )));
        }
        let z = self.scaler.transform(raw);
        let mut acc = self.bias;
        for (sv, &coef) in self.support_vectors.iter().zip(&self.dual_coefs) {
            acc += coef * (-self.params.gamma * sq_dist(&z, sv)).exp();
        }
        Ok(acc)
    }

    /// Predict from a named vector, verifying the schema first.
    pub fn predict_named(&self, names: &[String], values: &[f64]) -> Result<f64> {
        if names != self.feature_names.as_slice() {
            let missing: Vec<String> = self
                .feature_names
                .iter()
                .filter(|n| !names.contains(n))
                .cloned()
                .collect();
            return Err(Error::Schema(if missing.is_empty() {
                "feature names do not match the model's training order".into()
            } else {
                format!("vector is missing model features: {}", missing.join(", "))
            }));
        }
        self.predict(values)
    }

    /// Canonical JSON encoding; identical models produce identical bytes.
    pub fn save(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("model serialization cannot fail")
    }

    pub fn load(bytes: &[u8]) -> Result<SvrModel> {
        let model: SvrModel = serde_json::from_slice(bytes)
            .map_err(|e| Error::ModelFormat(format!("cannot decode model: {}", e)))?;
        if model.version != MODEL_VERSION {
            return Err(Error::ModelFormat(format!(
                "model version {} not supported (expected {})",
                model.version, MODEL_VERSION
            )));
        }
        if model.support_vectors.len() != model.dual_coefs.len() {
            return Err(Error::ModelFormat(
                "support vector and dual coefficient counts differ".into(),
            ));
        }
        Ok(model)
    }
}

/// Maximum KKT violation of a trained model on its training set, judged from
/// the model alone (predictions and dual coefficients).
pub fn audit_kkt(model: &SvrModel, x: &[Vec<f64>], y: &[f64]) -> Result<f64> {
    let (c, eps) = (model.params.c, model.params.epsilon);
    let scaled: Vec<Vec<f64>> = x.iter().map(|r| model.scaler.transform(r)).collect();
    // recover per-row dual coefficients by claiming each support vector for
    // exactly one matching row (rows may repeat)
    let mut claimed = vec![false; model.support_vectors.len()];
    let mut worst: f64 = 0.0;
    for (row, &target) in scaled.iter().zip(y) {
        let mut beta = 0.0;
        for (k, sv) in model.support_vectors.iter().enumerate() {
            if !claimed[k] && sv == row {
                claimed[k] = true;
                beta = model.dual_coefs[k];
                break;
            }
        }
        let mut f = model.bias;
        for (sv, &coef) in model.support_vectors.iter().zip(&model.dual_coefs) {
            f += coef * (-model.params.gamma * sq_dist(row, sv)).exp();
        }
        let e = f - target;
        let v = if beta.abs() < 1e-12 {
            (e.abs() - eps).max(0.0)
        } else if beta >= c - 1e-12 {
            (e + eps).max(0.0)
        } else if beta > 0.0 {
            (e + eps).abs()
        } else if beta <= -c + 1e-12 {
            (eps - e).max(0.0)
        } else {
            (e - eps).abs()
        };
        worst = worst.max(v);
        if beta.abs() > c + 1e-9 {
            return Err(Error::Input(format!(
                "dual coefficient {} outside the [-C, C] box",
                beta
            )));
        }
    }
    let balance: f64 = model.dual_coefs.iter().sum();
    if balance.abs() > 1e-6 * c.max(1.0) {
        return Err(Error::Input(format!(
            "dual coefficients sum to {} (expected 0)",
            balance
        )));
    }
    Ok(worst)
}
