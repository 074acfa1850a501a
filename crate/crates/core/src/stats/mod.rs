//! Evaluation statistics: rank/linear correlation, RMSE, the monotone
//! logistic mapping, Wilcoxon rank-sum tests and significance matrices.

mod logistic;
mod metrics;
mod significance;
mod wilcoxon;

pub use logistic::{fit_logistic, LogisticFit};
pub use metrics::{median, midranks, pearson_lcc, rmse, srocc, MetricTriple};
pub use significance::{significance_matrix, SignificanceMatrix};
pub use wilcoxon::{wilcoxon_rank_sum, wilcoxon_rank_sum_with, PMode, WilcoxonResult};
