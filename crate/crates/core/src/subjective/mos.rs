//! Global rescaling of retained z-scores and per-video MOS.

use std::collections::{BTreeMap, HashSet};

use super::zscores::ZScoreMatrix;
use crate::error::{Error, Result};
use crate::tables::{format_float, numbered_rows};

#[derive(Debug, Clone, PartialEq)]
pub struct MosRow {
    pub video_id: String,
    pub mos: f64,
    pub n_ratings: usize,
    /// Sample std of the rescaled scores (0 for a single rater).
    pub std: f64,
    /// 1.96 * std / sqrt(n).
    pub ci95: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MosTable {
    rows: Vec<MosRow>,
}

impl MosTable {
    pub fn rows(&self) -> &[MosRow] {
        &self.rows
    }

    pub fn get(&self, video_id: &str) -> Option<&MosRow> {
        self.rows.iter().find(|r| r.video_id == video_id)
    }

    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(c) = comment {
            out.push_str(&format!("# {}\n", c));
        }
        out.push_str("video_id,mos,n_ratings,std,ci95\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.video_id,
                format_float(r.mos),
                r.n_ratings,
                format_float(r.std),
                format_float(r.ci95)
            ));
        }
        out
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut lines = numbered_rows(text);
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Schema(format!("{}: empty MOS file", source)))?;
        if header.trim() != "video_id,mos,n_ratings,std,ci95" {
            return Err(Error::Schema(format!(
                "{}:1: expected header video_id,mos,n_ratings,std,ci95",
                source
            )));
        }
        let mut rows = Vec::new();
        let mut seen = HashSet::new();
        for (lineno, line) in lines {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(Error::Schema(format!(
                    "{}:{}: expected 5 fields, got {}",
                    source,
                    lineno,
                    f.len()
                )));
            }
            let num = |i: usize| -> Result<f64> {
                f[i].trim().parse().map_err(|_| {
                    Error::Schema(format!(
                        "{}:{}:{}: bad number {:?}",
                        source,
                        lineno,
                        i + 1,
                        f[i]
                    ))
                })
            };
            let id = f[0].trim().to_string();
            if !seen.insert(id.clone()) {
                return Err(Error::Schema(format!(
                    "{}:{}: duplicate video_id {:?}",
                    source, lineno, id
                )));
            }
            rows.push(MosRow {
                video_id: id,
                mos: num(1)?,
                n_ratings: f[2].trim().parse().map_err(|_| {
                    Error::Schema(format!("{}:{}:3: bad count {:?}", source, lineno, f[2]))
                })?,
                std: num(3)?,
                ci95: num(4)?,
            });
        }
        if rows.is_empty() {
            return Err(Error::Schema(format!("{}: no MOS rows", source)));
        }
        Ok(MosTable { rows })
    }
}

/// One global affine map sends the min/max retained z-score to 0/100; each
/// video's MOS is the mean of its rescaled retained scores.
pub fn rescale_and_mos(z: &ZScoreMatrix, rejected: &[String]) -> Result<MosTable> {
    let rejected: HashSet<&String> = rejected.iter().collect();
    let retained: Vec<_> = z
        .entries()
        .iter()
        .filter(|e| !rejected.contains(&e.subject_id))
        .collect();
    let mut empty: Vec<String> = z
        .videos()
        .iter()
        .filter(|v| !retained.iter().any(|e| &e.video_id == *v))
        .cloned()
        .collect();
    if !empty.is_empty() {
        empty.sort();
        return Err(Error::EmptyVideo { ids: empty });
    }
    let lo = retained.iter().map(|e| e.z).fold(f64::INFINITY, f64::min);
    let hi = retained
        .iter()
        .map(|e| e.z)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::DegenerateRange(
            "all retained z-scores are equal; cannot rescale to [0, 100]".into(),
        ));
    }
    let mut per_video: BTreeMap<&String, Vec<f64>> = BTreeMap::new();
    for e in &retained {
        per_video
            .entry(&e.video_id)
            .or_default()
            .push((e.z - lo) * 100.0 / (hi - lo));
    }
    let rows = per_video
        .into_iter()
        .map(|(video_id, scores)| {
            let n = scores.len();
            let mos = scores.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                (scores.iter().map(|s| (s - mos) * (s - mos)).sum::<f64>() / (n as f64 - 1.0))
                    .sqrt()
            } else {
                0.0
            };
            MosRow {
                video_id: video_id.clone(),
                mos,
                n_ratings: n,
                std,
                ci95: 1.96 * std / (n as f64).sqrt(),
            }
        })
        .collect();
    Ok(MosTable { rows })
}
