//! Optional hyperparameter selection: 5-fold cross validation over
//! C in {2^-3 .. 2^9} and gamma in {2^-9 .. 2^3} (integer exponents),
//! scored by mean squared error. Off by default; the CLI enables it with
//! `--grid-search`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{svr_train, SvrModel, SvrParams};
use crate::error::{Error, Result};

const FOLDS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchReport {
    pub best_c: f64,
    pub best_gamma: f64,
    pub cv_mse: f64,
}

/// Train with inner-CV hyperparameter selection, then refit on all rows.
pub fn grid_search_train(
    x: &[Vec<f64>],
    y: &[f64],
    feature_names: &[String],
    base: &SvrParams,
    seed: u64,
) -> Result<(SvrModel, GridSearchReport)> {
    let n = x.len();
    if n < FOLDS {
        return Err(Error::Input(format!(
            "grid search needs at least {} samples, got {}",
            FOLDS, n
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let folds: Vec<Vec<usize>> = split_folds(&order, FOLDS);

    let mut combos = Vec::new();
    for ce in -3..=9 {
        for ge in -9..=3 {
            combos.push((2f64.powi(ce), 2f64.powi(ge)));
        }
    }
    let scores: Vec<Result<f64>> = combos
        .par_iter()
        .map(|&(c, gamma)| {
            let mut sq_err = 0.0;
            let mut count = 0usize;
            for hold in 0..FOLDS {
                let test_idx = &folds[hold];
                let train_idx: Vec<usize> = folds
                    .iter()
                    .enumerate()
                    .filter(|(f, _)| *f != hold)
                    .flat_map(|(_, ids)| ids.iter().copied())
                    .collect();
                let tx: Vec<Vec<f64>> = train_idx.iter().map(|&i| x[i].clone()).collect();
                let ty: Vec<f64> = train_idx.iter().map(|&i| y[i]).collect();
                let params = SvrParams {
                    c,
                    gamma,
                    ..base.clone()
                };
                let model = svr_train(&tx, &ty, feature_names, &params, seed)?;
                for &i in test_idx {
                    let p = model.predict(&x[i])?;
                    sq_err += (p - y[i]) * (p - y[i]);
                    count += 1;
                }
            }
            Ok(sq_err / count as f64)
        })
        .collect();

    let mut best = (f64::INFINITY, combos[0]);
    for (score, combo) in scores.into_iter().zip(&combos) {
        let mse = score?;
        if mse < best.0 {
            best = (mse, *combo);
        }
    }
    let (c, gamma) = best.1;
    let params = SvrParams {
        c,
        gamma,
        ..base.clone()
    };
    let model = svr_train(x, y, feature_names, &params, seed)?;
    Ok((
        model,
        GridSearchReport {
            best_c: c,
            best_gamma: gamma,
            cv_mse: best.0,
        },
    ))
}

fn split_folds(order: &[usize], k: usize) -> Vec<Vec<usize>> {
    let n = order.len();
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut pos = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(order[pos..pos + len].to_vec());
        pos += len;
    }
    folds
}
