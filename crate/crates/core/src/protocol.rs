//! Evaluation protocols: repeated random train/test splits with median
//! metrics, and k-fold cross-validated per-video predictions.
//!
//! Iteration t derives its RNG from `seed + t`, so parallel execution cannot
//! change any result.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamevqp::{train_gamevqp, TrainConfig};
use crate::stats::{fit_logistic, median, rmse, srocc, MetricTriple};
use crate::subjective::MosTable;
use crate::tables::FeatureTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub iterations: usize,
    pub train_frac: f64,
    pub seed: u64,
    pub train: TrainConfig,
    /// Name recorded in reports and used by significance tables.
    pub model_name: String,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            iterations: 100,
            train_frac: 0.8,
            seed: 0,
            train: TrainConfig::default(),
            model_name: "gamevqp".into(),
        }
    }
}

/// Per-iteration metric distributions, their medians, and the resolved
/// configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub config: EvalConfig,
    pub n_videos: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub per_iteration: Vec<MetricTriple>,
    pub median: MetricTriple,
}

/// One cross-validated prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub video_id: String,
    pub prediction: f64,
    pub mos: f64,
}

/// Ids present in the MOS table and in every supplied feature table,
/// sorted. The evaluation universe.
fn joint_ids(
    features: &FeatureTable,
    deep: Option<&FeatureTable>,
    mos: &MosTable,
) -> Vec<String> {
    let mut ids: Vec<String> = mos
        .rows()
        .iter()
        .map(|r| r.video_id.clone())
        .filter(|id| features.get(id).is_some())
        .filter(|id| deep.is_none_or(|d| d.get(id).is_some()))
        .collect();
    ids.sort();
    ids
}

/// The train/test id partition of one protocol iteration: a seeded shuffle
/// of `ids` split at `train_size`. Iteration t shuffles with `seed + t`.
pub fn split_ids(
    ids: &[String],
    train_size: usize,
    seed: u64,
    iteration: usize,
) -> (Vec<String>, Vec<String>) {
    let mut shuffled = ids.to_vec();
    let derived = seed.wrapping_add(iteration as u64);
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(derived));
    let test = shuffled.split_off(train_size);
    (shuffled, test)
}

fn eval_split(
    features: &FeatureTable,
    deep: Option<&FeatureTable>,
    mos: &MosTable,
    ids: &[String],
    train_size: usize,
    config: &EvalConfig,
    iteration: usize,
) -> Result<MetricTriple> {
    let seed = config.seed.wrapping_add(iteration as u64);
    let (train_ids, test_ids) = split_ids(ids, train_size, config.seed, iteration);
    let (train_ids, test_ids) = (&train_ids[..], &test_ids[..]);

    let targets: Vec<f64> = train_ids
        .iter()
        .map(|id| mos.get(id).expect("id came from the MOS table").mos)
        .collect();
    let model = train_gamevqp(features, deep, train_ids, &targets, &config.train, seed)?;

    let mut predictions = Vec::with_capacity(test_ids.len());
    let mut truth = Vec::with_capacity(test_ids.len());
    for id in test_ids {
        let deep_row = deep.map(|d| d.get(id).expect("joined id"));
        predictions.push(model.predict(features.get(id).expect("joined id"), deep_row)?);
        truth.push(mos.get(id).expect("joined id").mos);
    }

    let s = srocc(&predictions, &truth)?;
    let fit = fit_logistic(&predictions, &truth)?;
    let mapped: Vec<f64> = predictions.iter().map(|&p| fit.apply(p)).collect();
    let l = crate::stats::pearson_lcc(&mapped, &truth)?;
    let r = rmse(&mapped, &truth)?;
    Ok(MetricTriple {
        srocc: s,
        lcc: l,
        rmse: r,
    })
}

/// Repeated non-overlapping train/test splits with median metrics. SROCC is
/// computed on raw predictions; LCC and RMSE after fitting the logistic map
/// on the same test split.
pub fn split_protocol(
    features: &FeatureTable,
    deep: Option<&FeatureTable>,
    mos: &MosTable,
    config: &EvalConfig,
) -> Result<SplitReport> {
    if config.iterations == 0 {
        return Err(Error::Input("need at least one iteration".into()));
    }
    if !(config.train_frac > 0.0 && config.train_frac < 1.0) {
        return Err(Error::Input(format!(
            "train fraction {} outside (0, 1)",
            config.train_frac
        )));
    }
    let ids = joint_ids(features, deep, mos);
    if ids.len() < 10 {
        return Err(Error::Input(format!(
            "evaluation needs at least 10 videos with features and MOS, got {}",
            ids.len()
        )));
    }
    let train_size = (config.train_frac * ids.len() as f64).floor() as usize;
    if train_size == 0 || train_size == ids.len() {
        return Err(Error::Input("split leaves an empty train or test set".into()));
    }

    let per_iteration: Vec<MetricTriple> = (0..config.iterations)
        .into_par_iter()
        .map(|t| eval_split(features, deep, mos, &ids, train_size, config, t))
        .collect::<Result<_>>()?;

    let med = MetricTriple {
        srocc: median(&per_iteration.iter().map(|m| m.srocc).collect::<Vec<_>>()),
        lcc: median(&per_iteration.iter().map(|m| m.lcc).collect::<Vec<_>>()),
        rmse: median(&per_iteration.iter().map(|m| m.rmse).collect::<Vec<_>>()),
    };
    Ok(SplitReport {
        config: config.clone(),
        n_videos: ids.len(),
        train_size,
        test_size: ids.len() - train_size,
        per_iteration,
        median: med,
    })
}

/// Disjoint-fold cross validation: every joined video is predicted exactly
/// once by a model trained on the other folds.
pub fn kfold_predictions(
    features: &FeatureTable,
    deep: Option<&FeatureTable>,
    mos: &MosTable,
    k: usize,
    config: &EvalConfig,
) -> Result<Vec<ScatterRow>> {
    let ids = joint_ids(features, deep, mos);
    if k < 2 {
        return Err(Error::Input("k-fold needs k >= 2".into()));
    }
    if ids.len() < k {
        return Err(Error::Input(format!(
            "{} videos cannot fill {} folds",
            ids.len(),
            k
        )));
    }
    let mut shuffled = ids.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let mut folds: Vec<Vec<String>> = vec![Vec::new(); k];
    let base = shuffled.len() / k;
    let extra = shuffled.len() % k;
    let mut pos = 0;
    for (f, fold) in folds.iter_mut().enumerate() {
        let len = base + usize::from(f < extra);
        fold.extend_from_slice(&shuffled[pos..pos + len]);
        pos += len;
    }

    let fold_rows: Vec<Vec<ScatterRow>> = folds
        .par_iter()
        .enumerate()
        .map(|(hold, fold)| {
            let train_ids: Vec<String> = folds
                .iter()
                .enumerate()
                .filter(|(f, _)| *f != hold)
                .flat_map(|(_, ids)| ids.iter().cloned())
                .collect();
            let targets: Vec<f64> = train_ids
                .iter()
                .map(|id| mos.get(id).expect("joined id").mos)
                .collect();
            let seed = config.seed.wrapping_add(hold as u64);
            let model =
                train_gamevqp(features, deep, &train_ids, &targets, &config.train, seed)?;
            fold.iter()
                .map(|id| {
                    let deep_row = deep.map(|d| d.get(id).expect("joined id"));
                    Ok(ScatterRow {
                        video_id: id.clone(),
                        prediction: model
                            .predict(features.get(id).expect("joined id"), deep_row)?,
                        mos: mos.get(id).expect("joined id").mos,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<ScatterRow> = fold_rows.into_iter().flatten().collect();
    rows.sort_by(|a, b| a.video_id.cmp(&b.video_id));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subjective::{rescale_and_mos, session_zscores, RatingEntry, RatingMatrix};

    /// MOS table built through the subjective pipeline from synthetic raters
    /// who track a per-video latent score.
    fn synthetic_mos(latents: &[(String, f64)]) -> MosTable {
        let mut entries = Vec::new();
        for s in 0..3 {
            for (id, q) in latents {
                // deterministic small disagreement keeps sessions non-degenerate
                let wiggle = ((s as f64) - 1.0) * 1.5;
                entries.push(RatingEntry {
                    subject_id: format!("s{s}"),
                    video_id: id.clone(),
                    session: 1,
                    score: (q + wiggle).clamp(0.0, 100.0),
                });
            }
        }
        let m = RatingMatrix::from_entries(entries).unwrap();
        rescale_and_mos(&session_zscores(&m).unwrap(), &[]).unwrap()
    }

    fn monotone_dataset(n: usize) -> (FeatureTable, MosTable) {
        let mut features = FeatureTable::new(vec!["x".into(), "noise".into()]);
        let mut latents = Vec::new();
        for i in 0..n {
            let id = format!("v{i:03}");
            let x = i as f64 / (n - 1) as f64;
            features
                .push(&id, vec![x, ((i * 37) % 11) as f64 / 11.0])
                .unwrap();
            latents.push((id, 10.0 + 80.0 * x));
        }
        (features, synthetic_mos(&latents))
    }

    #[test]
    fn split_sizes_match_the_train_fraction() {
        let (features, mos) = monotone_dataset(40);
        let config = EvalConfig {
            iterations: 3,
            seed: 5,
            ..EvalConfig::default()
        };
        let report = split_protocol(&features, None, &mos, &config).unwrap();
        assert_eq!(report.n_videos, 40);
        assert_eq!(report.train_size, 32);
        assert_eq!(report.test_size, 8);
        assert_eq!(report.per_iteration.len(), 3);
    }

    #[test]
    fn noiseless_monotone_data_is_perfectly_ranked() {
        let (features, mos) = monotone_dataset(40);
        let config = EvalConfig {
            iterations: 10,
            seed: 11,
            train: TrainConfig {
                grid_search: true,
                ..TrainConfig::default()
            },
            ..EvalConfig::default()
        };
        let report = split_protocol(&features, None, &mos, &config).unwrap();
        assert!(
            (report.median.srocc - 1.0).abs() < 1e-6,
            "median srocc {}",
            report.median.srocc
        );
    }

    #[test]
    fn report_is_deterministic_for_a_seed() {
        let (features, mos) = monotone_dataset(30);
        let config = EvalConfig {
            iterations: 4,
            seed: 7,
            ..EvalConfig::default()
        };
        let a = split_protocol(&features, None, &mos, &config).unwrap();
        let b = split_protocol(&features, None, &mos, &config).unwrap();
        assert_eq!(
            serde_json::to_vec(&a).unwrap(),
            serde_json::to_vec(&b).unwrap()
        );
    }

    #[test]
    fn kfold_partitions_every_video_once() {
        let (features, mos) = monotone_dataset(23);
        let config = EvalConfig {
            train: TrainConfig {
                grid_search: true,
                ..TrainConfig::default()
            },
            ..EvalConfig::default()
        };
        let rows = kfold_predictions(&features, None, &mos, 5, &config).unwrap();
        assert_eq!(rows.len(), 23);
        let mut ids: Vec<&str> = rows.iter().map(|r| r.video_id.as_str()).collect();
        ids.dedup();
        assert_eq!(ids.len(), 23);
        let preds: Vec<f64> = rows.iter().map(|r| r.prediction).collect();
        let truth: Vec<f64> = rows.iter().map(|r| r.mos).collect();
        let s = srocc(&preds, &truth).unwrap();
        assert!(s >= 0.99, "aggregated srocc {s}");
    }
}
