//! Natural-scene-statistics features: SI/TI, MSCN coefficients, GGD/AGGD
//! moment fits, BRISQUE-style per-frame features, and the pooled per-clip
//! feature bag.

mod bag;
mod brisque;
mod fits;
mod mscn;
mod siti;

pub use bag::{nss_bag, nss_feature_names, FeatureVector, NSS_FEATURE_COUNT};
pub use brisque::{
    brisque_frame_features, brisque_single_scale, downsample_half, BRISQUE_FEATURE_COUNT,
};
pub use fits::{fit_aggd, fit_ggd, AggdFit, GgdFit};
pub use mscn::mscn;
pub use siti::{sobel_magnitude, spatial_info, temporal_info, SiTi};
