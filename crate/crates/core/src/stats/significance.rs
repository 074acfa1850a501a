//! Pairwise one-sided Wilcoxon significance matrices over per-model metric
//! distributions.

use serde::{Deserialize, Serialize};

use super::wilcoxon::{wilcoxon_rank_sum_with, PMode};
use crate::error::{Error, Result};

/// Square antisymmetric matrix with entries in {-1, 0, 1}: 1 means the row
/// model's distribution is statistically superior to the column model's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceMatrix {
    pub model_names: Vec<String>,
    pub metric: String,
    pub alpha: f64,
    pub entries: Vec<Vec<i8>>,
}

/// Build the matrix from per-model metric distributions (one value per
/// protocol iteration). Decision rule: entry = 1 when p(row > col) <= alpha,
/// -1 when p(row < col) <= alpha, else 0.
pub fn significance_matrix(
    model_names: &[String],
    distributions: &[Vec<f64>],
    metric: &str,
    alpha: f64,
) -> Result<SignificanceMatrix> {
    if model_names.len() != distributions.len() {
        return Err(Error::Dimension(format!(
            "{} names for {} distributions",
            model_names.len(),
            distributions.len()
        )));
    }
    if model_names.len() < 2 {
        return Err(Error::Input("significance needs at least 2 models".into()));
    }
    let len = distributions[0].len();
    if len == 0 || distributions.iter().any(|d| d.len() != len) {
        return Err(Error::Dimension(
            "metric distributions must share the iteration count".into(),
        ));
    }
    let n = model_names.len();
    let mut entries = vec![vec![0i8; n]; n];
    for row in 0..n {
        for col in 0..row {
            let r = wilcoxon_rank_sum_with(&distributions[row], &distributions[col], PMode::Auto)?;
            let e = if r.p_greater <= alpha {
                1
            } else if r.p_less <= alpha {
                -1
            } else {
                0
            };
            entries[row][col] = e;
            entries[col][row] = -e;
        }
    }
    Ok(SignificanceMatrix {
        model_names: model_names.to_vec(),
        metric: metric.to_string(),
        alpha,
        entries,
    })
}
