//! gamevqa-core: a no-reference video quality assessment toolkit for gaming
//! video.
//!
//! The crate covers the full measurement chain: Y4M/YUV ingestion, SI/TI and
//! natural-scene-statistics feature extraction, an epsilon-SVR learner with
//! its own SMO solver, the two-branch quality predictor, subjective-score
//! processing (z-scores, BT.500 subject rejection, MOS), and the evaluation
//! harness (correlation metrics, logistic mapping, split protocols, Wilcoxon
//! significance matrices).

pub mod error;
pub mod gamevqp;
pub mod nss;
pub mod protocol;
pub mod stats;
pub mod subjective;
pub mod tables;
pub mod svr;
pub mod video;

pub use error::{Error, Result};
