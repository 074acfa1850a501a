//! Subjective-score processing: per-session z-scores, BT.500-style subject
//! rejection, global rescaling to MOS, and rater-consistency analysis.

mod consistency;
mod mos;
mod ratings;
mod zscores;

pub use consistency::{
    inter_subject_consistency, intra_subject_consistency, InterSubjectReport, IntraSubjectReport,
};
pub use mos::{rescale_and_mos, MosRow, MosTable};
pub use ratings::{RatingEntry, RatingMatrix};
pub use zscores::{bt500_reject, session_zscores, RejectionReport, SubjectScreen, VideoScreen, ZScoreMatrix};
