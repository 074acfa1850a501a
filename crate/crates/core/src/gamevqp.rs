//! The two-branch quality predictor: an SVR over NSS features and an
//! optional SVR over externally extracted deep features, with the final
//! score being the mean of the branch predictions.
//!
//! Deep features are ingested from `deep.csv` (`video_id,d_0,...,d_{k-1}`)
//! and treated as opaque vectors; extracting them is out of scope here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::svr::{grid_search_train, svr_train, SvrModel, SvrParams};
use crate::tables::FeatureTable;

const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameVqpMode {
    Full,
    NssOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameVqpModel {
    pub version: u32,
    pub mode: GameVqpMode,
    pub nss_branch: SvrModel,
    pub deep_branch: Option<SvrModel>,
}

/// Training knobs shared by both branches. `gamma: None` keeps the 1/d
/// default per branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub c: f64,
    pub epsilon: f64,
    pub tol: f64,
    pub gamma: Option<f64>,
    pub grid_search: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            c: 1.0,
            epsilon: 0.1,
            tol: 1e-3,
            gamma: None,
            grid_search: false,
        }
    }
}

impl TrainConfig {
    pub fn svr_params(&self, n_samples: usize, n_features: usize) -> SvrParams {
        let defaults = SvrParams::defaults(n_samples, n_features);
        SvrParams {
            c: self.c,
            epsilon: self.epsilon,
            tol: self.tol,
            gamma: self.gamma.unwrap_or(defaults.gamma),
            max_passes: defaults.max_passes,
        }
    }
}

fn gather_rows(
    table: &FeatureTable,
    ids: &[String],
    label: &str,
) -> Result<Vec<Vec<f64>>> {
    let mut missing = Vec::new();
    let mut rows = Vec::with_capacity(ids.len());
    for id in ids {
        match table.get(id) {
            Some(row) => rows.push(row.to_vec()),
            None => missing.push(id.clone()),
        }
    }
    if !missing.is_empty() {
        missing.sort();
        return Err(Error::Join {
            ids: missing
                .into_iter()
                .map(|id| format!("{} (missing from {})", id, label))
                .collect(),
        });
    }
    Ok(rows)
}

fn train_branch(
    table: &FeatureTable,
    ids: &[String],
    targets: &[f64],
    label: &str,
    config: &TrainConfig,
    seed: u64,
) -> Result<SvrModel> {
    let rows = gather_rows(table, ids, label)?;
    let params = config.svr_params(rows.len(), table.feature_names().len());
    if config.grid_search {
        let (model, _) = grid_search_train(&rows, targets, table.feature_names(), &params, seed)?;
        Ok(model)
    } else {
        svr_train(&rows, targets, table.feature_names(), &params, seed)
    }
}

/// Train both branches on identical (video, target) pairs. `targets` holds
/// the MOS for each id in `ids`.
pub fn train_gamevqp(
    nss: &FeatureTable,
    deep: Option<&FeatureTable>,
    ids: &[String],
    targets: &[f64],
    config: &TrainConfig,
    seed: u64,
) -> Result<GameVqpModel> {
    if ids.len() != targets.len() {
        return Err(Error::Dimension(format!(
            "{} ids but {} targets",
            ids.len(),
            targets.len()
        )));
    }
    let nss_branch = train_branch(nss, ids, targets, "NSS features", config, seed)?;
    let deep_branch = match deep {
        Some(table) => Some(train_branch(table, ids, targets, "deep features", config, seed)?),
        None => None,
    };
    Ok(GameVqpModel {
        version: MODEL_VERSION,
        mode: if deep_branch.is_some() {
            GameVqpMode::Full
        } else {
            GameVqpMode::NssOnly
        },
        nss_branch,
        deep_branch,
    })
}

impl GameVqpModel {
    /// Average of the branch predictions (full mode) or the NSS branch alone.
    pub fn predict(&self, nss_vector: &[f64], deep_vector: Option<&[f64]>) -> Result<f64> {
        let nss_pred = self.nss_branch.predict(nss_vector)?;
        match (&self.deep_branch, deep_vector) {
            (Some(branch), Some(v)) => Ok((nss_pred + branch.predict(v)?) / 2.0),
            (Some(_), None) => Err(Error::Schema(
                "model is in full mode but no deep vector was supplied".into(),
            )),
            (None, _) => Ok(nss_pred),
        }
    }

    pub fn save(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("model serialization cannot fail")
    }

    pub fn load(bytes: &[u8]) -> Result<GameVqpModel> {
        let model: GameVqpModel = serde_json::from_slice(bytes)
            .map_err(|e| Error::ModelFormat(format!("cannot decode model: {}", e)))?;
        if model.version != MODEL_VERSION {
            return Err(Error::ModelFormat(format!(
                "model version {} not supported (expected {})",
                model.version, MODEL_VERSION
            )));
        }
        let full = model.mode == GameVqpMode::Full;
        if full != model.deep_branch.is_some() {
            return Err(Error::ModelFormat(
                "mode and deep branch presence disagree".into(),
            ));
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy_tables(n: usize, seed: u64) -> (FeatureTable, FeatureTable, Vec<String>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut nss = FeatureTable::new(vec!["n0".into(), "n1".into()]);
        let mut deep = FeatureTable::new(vec!["d_0".into(), "d_1".into(), "d_2".into()]);
        let mut ids = Vec::new();
        let mut targets = Vec::new();
        for i in 0..n {
            let id = format!("v{i:02}");
            let a = rng.random_range(0.0..1.0);
            let b = rng.random_range(0.0..1.0);
            nss.push(&id, vec![a, b]).unwrap();
            deep.push(&id, vec![a + 0.1, b - 0.1, a * b]).unwrap();
            ids.push(id);
            targets.push(20.0 + 60.0 * a);
        }
        (nss, deep, ids, targets)
    }

    #[test]
    fn missing_deep_table_means_nss_only() {
        let (nss, _, ids, targets) = toy_tables(8, 1);
        let model =
            train_gamevqp(&nss, None, &ids, &targets, &TrainConfig::default(), 0).unwrap();
        assert_eq!(model.mode, GameVqpMode::NssOnly);
        assert!(model.deep_branch.is_none());
        let row = nss.get("v00").unwrap();
        assert_eq!(
            model.predict(row, None).unwrap(),
            model.nss_branch.predict(row).unwrap()
        );
    }

    #[test]
    fn missing_training_id_is_a_join_error() {
        let (nss, deep, mut ids, mut targets) = toy_tables(8, 2);
        ids.push("v99".into());
        targets.push(50.0);
        match train_gamevqp(&nss, Some(&deep), &ids, &targets, &TrainConfig::default(), 0) {
            Err(Error::Join { ids }) => {
                assert_eq!(ids.len(), 1);
                assert!(ids[0].contains("v99"), "{ids:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn full_mode_averages_branches() {
        let (nss, deep, ids, targets) = toy_tables(10, 3);
        let model = train_gamevqp(
            &nss,
            Some(&deep),
            &ids,
            &targets,
            &TrainConfig::default(),
            0,
        )
        .unwrap();
        assert_eq!(model.mode, GameVqpMode::Full);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let nv = vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
            let dv = vec![
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..1.0),
            ];
            let a = model.nss_branch.predict(&nv).unwrap();
            let b = model.deep_branch.as_ref().unwrap().predict(&dv).unwrap();
            let fused = model.predict(&nv, Some(&dv)).unwrap();
            assert_eq!(fused, (a + b) / 2.0);
            assert!(fused >= a.min(b) && fused <= a.max(b));
        }
        assert!(matches!(
            model.predict(&[0.5, 0.5], None),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn model_round_trips_with_identical_predictions() {
        let (nss, deep, ids, targets) = toy_tables(10, 4);
        let model = train_gamevqp(
            &nss,
            Some(&deep),
            &ids,
            &targets,
            &TrainConfig::default(),
            1,
        )
        .unwrap();
        let bytes = model.save();
        let loaded = GameVqpModel::load(&bytes).unwrap();
        assert_eq!(bytes, loaded.save());
        for id in &ids {
            let p1 = model.predict(nss.get(id).unwrap(), deep.get(id).map(|r| r)).unwrap();
            let p2 = loaded
                .predict(nss.get(id).unwrap(), deep.get(id).map(|r| r))
                .unwrap();
            assert_eq!(p1, p2);
        }
        assert!(GameVqpModel::load(&bytes[..10]).is_err());
    }
}
