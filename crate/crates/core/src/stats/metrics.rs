//! Correlation and error metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// SROCC / LCC / RMSE of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricTriple {
    pub srocc: f64,
    pub lcc: f64,
    pub rmse: f64,
}

/// 1-based ranks with ties replaced by midranks.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = rank;
        }
        i = j;
    }
    ranks
}

fn check_pair(x: &[f64], y: &[f64], min_len: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "lists of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < min_len {
        return Err(Error::Input(format!(
            "need at least {} points, got {}",
            min_len,
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite value in metric input".into()));
    }
    Ok(())
}

fn is_constant(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

/// Pearson correlation of midrank-transformed lists.
pub fn srocc(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y, 3)?;
    if is_constant(x) || is_constant(y) {
        return Err(Error::DegenerateInput(
            "rank correlation of a constant list".into(),
        ));
    }
    pearson(&midranks(x), &midranks(y))
}

/// Plain Pearson linear correlation.
pub fn pearson_lcc(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y, 3)?;
    if is_constant(x) || is_constant(y) {
        return Err(Error::DegenerateInput(
            "linear correlation of a constant list".into(),
        ));
    }
    pearson(x, y)
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateInput(
            "correlation of a constant list".into(),
        ));
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Root mean squared error.
pub fn rmse(pred: &[f64], target: &[f64]) -> Result<f64> {
    check_pair(pred, target, 1)?;
    let n = pred.len() as f64;
    let sse = pred
        .iter()
        .zip(target)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<f64>();
    Ok((sse / n).sqrt())
}

/// Median; for even lengths, the mean of the two central order statistics.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty list");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn srocc_landmarks() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((srocc(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let rev = [5.0, 4.0, 3.0, 2.0, 1.0];
        assert!((srocc(&x, &rev).unwrap() + 1.0).abs() < 1e-15);
        let y = [1.0, 3.0, 2.0, 4.0, 5.0];
        assert!((srocc(&x, &y).unwrap() - 0.9).abs() < 1e-12);
        assert!(matches!(
            srocc(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn pearson_and_rmse_landmarks() {
        let x = [1.0, 2.0, 3.0];
        let affine = [3.0, 5.0, 7.0];
        assert!((pearson_lcc(&x, &affine).unwrap() - 1.0).abs() < 1e-15);
        let y = [1.0, 2.0, 4.0];
        assert!((pearson_lcc(&x, &y).unwrap() - 0.98198).abs() < 1e-5);
        assert_eq!(rmse(&x, &x).unwrap(), 0.0);
        let r = rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert!((r - 3.53553).abs() < 1e-5);
    }

    #[test]
    fn midranks_handle_ties() {
        assert_eq!(midranks(&[10.0, 20.0, 20.0, 30.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(midranks(&[5.0, 5.0, 5.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn median_conventions() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    // test-only brute-force references computed the long way
    pub(crate) fn brute_spearman(x: &[f64], y: &[f64]) -> f64 {
        brute_pearson(&brute_ranks(x), &brute_ranks(y))
    }

    pub(crate) fn brute_ranks(v: &[f64]) -> Vec<f64> {
        v.iter()
            .map(|&a| {
                let less = v.iter().filter(|&&b| b < a).count() as f64;
                let equal = v.iter().filter(|&&b| b == a).count() as f64;
                less + (equal + 1.0) / 2.0
            })
            .collect()
    }

    pub(crate) fn brute_pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let cov = x
            .iter()
            .zip(y)
            .map(|(&a, &b)| (a - mx) * (b - my))
            .sum::<f64>()
            / n;
        let vx = x.iter().map(|&a| (a - mx) * (a - mx)).sum::<f64>() / n;
        let vy = y.iter().map(|&b| (b - my) * (b - my)).sum::<f64>() / n;
        cov / (vx.sqrt() * vy.sqrt())
    }

    #[test]
    fn agrees_with_brute_force_including_ties() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let n = rng.random_range(3..=50);
            let x: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..20))).collect();
            let y: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..20))).collect();
            let (Ok(s), Ok(p)) = (srocc(&x, &y), pearson_lcc(&x, &y)) else {
                continue; // constant draw
            };
            assert!((s - brute_spearman(&x, &y)).abs() < 1e-12);
            assert!((p - brute_pearson(&x, &y)).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn srocc_invariant_under_increasing_transforms(
            xs in proptest::collection::vec(-100.0f64..100.0, 5..30),
            ys in proptest::collection::vec(-100.0f64..100.0, 5..30),
        ) {
            let n = xs.len().min(ys.len());
            let (x, y) = (&xs[..n], &ys[..n]);
            if srocc(x, y).is_err() {
                return Ok(());
            }
            let fx: Vec<f64> = x.iter().map(|v| v.exp()).collect();
            let gy: Vec<f64> = y.iter().map(|v| v * 3.0 + 11.0).collect();
            let base = srocc(x, y).unwrap();
            prop_assert!((srocc(&fx, y).unwrap() - base).abs() < 1e-12);
            prop_assert!((srocc(x, &gy).unwrap() - base).abs() < 1e-12);
        }
    }
}
