//! Inter- and intra-subject consistency of raw ratings.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mos::MosTable;
use super::ratings::RatingMatrix;
use crate::error::{Error, Result};
use crate::stats::{median, srocc};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterSubjectReport {
    pub split_sroccs: Vec<f64>,
    pub median_srocc: f64,
    pub n_splits: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntraSubjectReport {
    pub per_subject: Vec<(String, f64)>,
    pub skipped: Vec<(String, String)>,
    pub median_srocc: f64,
}

/// For each split, randomly halve every video's raters (dropping one rating
/// at random when the count is odd), build the two group MOS vectors over
/// raw scores, and record their SROCC. Split t uses the derived seed
/// `seed + t`.
pub fn inter_subject_consistency(
    ratings: &RatingMatrix,
    n_splits: usize,
    seed: u64,
) -> Result<InterSubjectReport> {
    if n_splits == 0 {
        return Err(Error::Input("need at least one split".into()));
    }
    for video in ratings.videos() {
        if ratings.ratings_of_video(video).len() < 2 {
            return Err(Error::Input(format!(
                "video {:?} has fewer than 2 ratings",
                video
            )));
        }
    }
    let mut split_sroccs = Vec::with_capacity(n_splits);
    for t in 0..n_splits {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let mut group_a = Vec::with_capacity(ratings.videos().len());
        let mut group_b = Vec::with_capacity(ratings.videos().len());
        for video in ratings.videos() {
            let mut scores: Vec<f64> = ratings
                .ratings_of_video(video)
                .iter()
                .map(|e| e.score)
                .collect();
            scores.shuffle(&mut rng);
            let even = scores.len() - scores.len() % 2;
            let half = even / 2;
            group_a.push(scores[..half].iter().sum::<f64>() / half as f64);
            group_b.push(scores[half..even].iter().sum::<f64>() / half as f64);
        }
        split_sroccs.push(srocc(&group_a, &group_b)?);
    }
    Ok(InterSubjectReport {
        median_srocc: median(&split_sroccs),
        split_sroccs,
        n_splits,
        seed,
    })
}

/// SROCC between each subject's raw scores and the MOS of the videos they
/// rated. Subjects with fewer than 3 usable ratings (or constant scores) are
/// skipped with a reason.
pub fn intra_subject_consistency(
    ratings: &RatingMatrix,
    mos: &MosTable,
) -> Result<IntraSubjectReport> {
    let mut per_subject = Vec::new();
    let mut skipped = Vec::new();
    for subject in ratings.subjects() {
        let pairs: Vec<(f64, f64)> = ratings
            .entries()
            .iter()
            .filter(|e| &e.subject_id == subject)
            .filter_map(|e| mos.get(&e.video_id).map(|row| (e.score, row.mos)))
            .collect();
        if pairs.len() < 3 {
            skipped.push((
                subject.clone(),
                format!("only {} ratings with MOS", pairs.len()),
            ));
            continue;
        }
        let own: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let target: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        match srocc(&own, &target) {
            Ok(v) => per_subject.push((subject.clone(), v)),
            Err(e) => skipped.push((subject.clone(), e.to_string())),
        }
    }
    if per_subject.is_empty() {
        return Err(Error::Input(
            "no subject had enough ratings for the intra-subject test".into(),
        ));
    }
    let values: Vec<f64> = per_subject.iter().map(|p| p.1).collect();
    Ok(IntraSubjectReport {
        median_srocc: median(&values),
        per_subject,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subjective::ratings::RatingEntry;
    use crate::subjective::zscores::session_zscores;
    use crate::subjective::rescale_and_mos;

    fn grid(subjects: usize, scores: impl Fn(usize, usize) -> f64, videos: usize) -> RatingMatrix {
        let mut entries = Vec::new();
        for s in 0..subjects {
            for v in 0..videos {
                entries.push(RatingEntry {
                    subject_id: format!("s{s:02}"),
                    video_id: format!("v{v:02}"),
                    session: 1,
                    score: scores(s, v),
                });
            }
        }
        RatingMatrix::from_entries(entries).unwrap()
    }

    #[test]
    fn identical_subjects_split_perfectly() {
        let m = grid(6, |_, v| (v * 7 % 50) as f64, 10);
        let report = inter_subject_consistency(&m, 20, 3).unwrap();
        assert!(report.split_sroccs.iter().all(|&s| (s - 1.0).abs() < 1e-12));
        assert_eq!(report.median_srocc, 1.0);
    }

    #[test]
    fn subject_equal_to_mos_scores_one_and_reversed_scores_minus_one() {
        let m = grid(4, |s, v| {
            let base = (v * 9 % 70) as f64 + 10.0;
            if s == 3 {
                90.0 - base // reversed ranking
            } else {
                base
            }
        }, 8);
        let mos = rescale_and_mos(&session_zscores(&m).unwrap(), &[]).unwrap();
        let report = intra_subject_consistency(&m, &mos).unwrap();
        let by_id: std::collections::HashMap<_, _> =
            report.per_subject.iter().cloned().collect();
        // subjects 0..2 match the MOS ranking exactly
        assert!((by_id["s00"] - 1.0).abs() < 1e-12);
        assert!((by_id["s03"] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn synthetic_latent_quality_has_high_inter_consistency() {
        use rand::{Rng, SeedableRng};
        for seed in 0..3u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let latent: Vec<f64> = (0..100).map(|_| rng.random_range(5.0..95.0)).collect();
            let m = {
                let mut entries = Vec::new();
                for s in 0..30 {
                    for (v, &q) in latent.iter().enumerate() {
                        entries.push(RatingEntry {
                            subject_id: format!("s{s:02}"),
                            video_id: format!("v{v:03}"),
                            session: 1,
                            score: (q + rng.random_range(-5.0..5.0)).clamp(0.0, 100.0),
                        });
                    }
                }
                RatingMatrix::from_entries(entries).unwrap()
            };
            let report = inter_subject_consistency(&m, 25, seed).unwrap();
            assert!(
                report.median_srocc >= 0.9,
                "seed {seed}: median {}",
                report.median_srocc
            );
        }
    }
}
