//! Per-session standardization and kurtosis-gated subject rejection.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ratings::RatingMatrix;
use crate::error::{Error, Result};

/// One standardized rating.
#[derive(Debug, Clone, PartialEq)]
pub struct ZEntry {
    pub subject_id: String,
    pub video_id: String,
    pub z: f64,
}

/// Per-(subject, session) statistics kept for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub subject_id: String,
    pub session: u8,
    pub mean: f64,
    /// Sample (N-1) standard deviation.
    pub std: f64,
    pub count: usize,
}

/// Sparse z-score matrix: one z per (subject, video), sessions merged.
#[derive(Debug, Clone)]
pub struct ZScoreMatrix {
    entries: Vec<ZEntry>,
    groups: Vec<GroupStats>,
    subjects: Vec<String>,
    videos: Vec<String>,
}

impl ZScoreMatrix {
    pub fn entries(&self) -> &[ZEntry] {
        &self.entries
    }

    pub fn group_stats(&self) -> &[GroupStats] {
        &self.groups
    }

    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    pub fn videos(&self) -> &[String] {
        &self.videos
    }
}

/// z = (s - mean) / std within each (subject, session), sample std.
pub fn session_zscores(ratings: &RatingMatrix) -> Result<ZScoreMatrix> {
    let mut by_group: BTreeMap<(String, u8), Vec<usize>> = BTreeMap::new();
    for (i, e) in ratings.entries().iter().enumerate() {
        by_group
            .entry((e.subject_id.clone(), e.session))
            .or_default()
            .push(i);
    }
    let mut entries = Vec::with_capacity(ratings.entries().len());
    let mut groups = Vec::with_capacity(by_group.len());
    for ((subject, session), idxs) in by_group {
        let scores: Vec<f64> = idxs.iter().map(|&i| ratings.entries()[i].score).collect();
        let n = scores.len();
        if n < 2 {
            return Err(Error::DegenerateSession {
                subject,
                session,
                reason: format!("only {} rating(s); need at least 2", n),
            });
        }
        let mean = scores.iter().sum::<f64>() / n as f64;
        let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n as f64 - 1.0);
        let std = var.sqrt();
        if std <= 0.0 {
            return Err(Error::DegenerateSession {
                subject,
                session,
                reason: "all scores identical (zero standard deviation)".into(),
            });
        }
        for &i in &idxs {
            let e = &ratings.entries()[i];
            entries.push(ZEntry {
                subject_id: e.subject_id.clone(),
                video_id: e.video_id.clone(),
                z: (e.score - mean) / std,
            });
        }
        groups.push(GroupStats {
            subject_id: subject,
            session,
            mean,
            std,
            count: n,
        });
    }
    entries.sort_by(|a, b| (&a.subject_id, &a.video_id).cmp(&(&b.subject_id, &b.video_id)));
    Ok(ZScoreMatrix {
        entries,
        groups,
        subjects: ratings.subjects().to_vec(),
        videos: ratings.videos().to_vec(),
    })
}

/// Per-subject outlier screen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectScreen {
    pub subject_id: String,
    pub p_count: usize,
    pub q_count: usize,
    pub total_ratings: usize,
    pub rejected: bool,
}

/// Per-video statistics used by the screen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoScreen {
    pub video_id: String,
    pub mean: f64,
    pub std: f64,
    pub kurtosis: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionReport {
    pub subjects: Vec<SubjectScreen>,
    pub videos: Vec<VideoScreen>,
    pub rejected: Vec<String>,
}

/// Kurtosis-gated screen over z-scores, applied once.
///
/// Per video: population moments give mean, std and kurtosis beta2 =
/// m4/m2^2; the outlier threshold is 2*std for 2 <= beta2 <= 4 (roughly
/// Gaussian) and sqrt(20)*std otherwise. A subject is rejected when more
/// than 5% of their ratings fall outside the thresholds and the excursions
/// are not one-sided (|P - Q| / (P + Q) < 0.3).
pub fn bt500_reject(z: &ZScoreMatrix) -> Result<RejectionReport> {
    if z.subjects().len() < 3 {
        return Err(Error::Input(format!(
            "subject rejection needs at least 3 subjects, got {}",
            z.subjects().len()
        )));
    }
    let mut videos = Vec::with_capacity(z.videos().len());
    let mut bounds = BTreeMap::new();
    for video in z.videos() {
        let vals: Vec<f64> = z
            .entries()
            .iter()
            .filter(|e| &e.video_id == video)
            .map(|e| e.z)
            .collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let m2 = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let m4 = vals.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
        let std = m2.sqrt();
        let kurtosis = if m2 > 0.0 { m4 / (m2 * m2) } else { 3.0 };
        let threshold = if (2.0..=4.0).contains(&kurtosis) {
            2.0 * std
        } else {
            20f64.sqrt() * std
        };
        bounds.insert(video.clone(), (mean - threshold, mean + threshold));
        videos.push(VideoScreen {
            video_id: video.clone(),
            mean,
            std,
            kurtosis,
            threshold,
        });
    }
    let mut subjects = Vec::with_capacity(z.subjects().len());
    let mut rejected = Vec::new();
    for subject in z.subjects() {
        let mut p_count = 0usize;
        let mut q_count = 0usize;
        let mut total = 0usize;
        for e in z.entries().iter().filter(|e| &e.subject_id == subject) {
            let (lo, hi) = bounds[&e.video_id];
            if e.z > hi {
                p_count += 1;
            } else if e.z < lo {
                q_count += 1;
            }
            total += 1;
        }
        let outliers = p_count + q_count;
        let reject = outliers as f64 / total as f64 > 0.05
            && outliers > 0
            && ((p_count as f64 - q_count as f64).abs() / outliers as f64) < 0.3;
        if reject {
            rejected.push(subject.clone());
        }
        subjects.push(SubjectScreen {
            subject_id: subject.clone(),
            p_count,
            q_count,
            total_ratings: total,
            rejected: reject,
        });
    }
    Ok(RejectionReport {
        subjects,
        videos,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subjective::ratings::RatingEntry;

    fn matrix(entries: Vec<(&str, &str, u8, f64)>) -> RatingMatrix {
        RatingMatrix::from_entries(
            entries
                .into_iter()
                .map(|(s, v, k, score)| RatingEntry {
                    subject_id: s.into(),
                    video_id: v.into(),
                    session: k,
                    score,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_score_session_standardizes_to_known_values() {
        let m = matrix(vec![("s1", "v1", 1, 40.0), ("s1", "v2", 1, 60.0)]);
        let z = session_zscores(&m).unwrap();
        let vals: Vec<f64> = z.entries().iter().map(|e| e.z).collect();
        assert!((vals[0] + 0.7071067811865475).abs() < 1e-12, "{vals:?}");
        assert!((vals[1] - 0.7071067811865475).abs() < 1e-12);
        assert!((z.group_stats()[0].std - 14.142135623730951).abs() < 1e-12);
    }

    #[test]
    fn constant_session_is_degenerate() {
        let m = matrix(vec![("s1", "v1", 1, 50.0), ("s1", "v2", 1, 50.0)]);
        match session_zscores(&m) {
            Err(Error::DegenerateSession { subject, session, .. }) => {
                assert_eq!(subject, "s1");
                assert_eq!(session, 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn standardization_identity_holds() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let mut entries = Vec::new();
        for s in 0..5 {
            for k in 1..=3u8 {
                for v in 0..12 {
                    entries.push((
                        format!("s{s}"),
                        format!("v{k}_{v}"),
                        k,
                        rng.random_range(0.0..100.0f64),
                    ));
                }
            }
        }
        let m = RatingMatrix::from_entries(
            entries
                .into_iter()
                .map(|(s, v, k, score)| RatingEntry {
                    subject_id: s,
                    video_id: v,
                    session: k,
                    score,
                })
                .collect(),
        )
        .unwrap();
        let z = session_zscores(&m).unwrap();
        for g in z.group_stats() {
            let zs: Vec<f64> = m
                .entries()
                .iter()
                .zip(z.entries())
                .filter(|(e, _)| e.subject_id == g.subject_id && e.session == g.session)
                .map(|(_, ze)| ze.z)
                .collect();
            assert_eq!(zs.len(), g.count);
            let mean = zs.iter().sum::<f64>() / zs.len() as f64;
            let var = zs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (zs.len() as f64 - 1.0);
            assert!(mean.abs() < 1e-9);
            assert!((var.sqrt() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn identical_subjects_are_never_rejected() {
        let mut entries = Vec::new();
        for s in 0..4 {
            for v in 0..8 {
                entries.push((format!("s{s}"), format!("v{v}"), 1u8, (v * 10) as f64));
            }
        }
        let m = RatingMatrix::from_entries(
            entries
                .into_iter()
                .map(|(s, v, k, score)| RatingEntry {
                    subject_id: s,
                    video_id: v,
                    session: k,
                    score,
                })
                .collect(),
        )
        .unwrap();
        let z = session_zscores(&m).unwrap();
        let report = bt500_reject(&z).unwrap();
        assert!(report.rejected.is_empty());
        assert!(report.subjects.iter().all(|s| s.p_count == 0 && s.q_count == 0));
    }
}
