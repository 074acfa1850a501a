//! Raw subjective ratings: sparse (subject, video, session) -> score entries.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tables::numbered_rows;

#[derive(Debug, Clone, PartialEq)]
pub struct RatingEntry {
    pub subject_id: String,
    pub video_id: String,
    pub session: u8,
    pub score: f64,
}

/// At most one entry per (subject, video); scores in [0, 100]; sessions in
/// {1, 2, 3}.
#[derive(Debug, Clone)]
pub struct RatingMatrix {
    entries: Vec<RatingEntry>,
    subjects: Vec<String>,
    videos: Vec<String>,
}

impl RatingMatrix {
    pub fn from_entries(mut entries: Vec<RatingEntry>) -> Result<Self> {
        // canonical order makes every downstream product independent of the
        // file's row order
        entries.sort_by(|a, b| {
            (&a.subject_id, &a.video_id).cmp(&(&b.subject_id, &b.video_id))
        });
        let mut seen: HashMap<(String, String), ()> = HashMap::new();
        for e in &entries {
            if e.session < 1 || e.session > 3 {
                return Err(Error::Schema(format!(
                    "subject {:?} video {:?}: session {} outside {{1,2,3}}",
                    e.subject_id, e.video_id, e.session
                )));
            }
            if !(0.0..=100.0).contains(&e.score) || !e.score.is_finite() {
                return Err(Error::Schema(format!(
                    "subject {:?} video {:?}: score {} outside [0, 100]",
                    e.subject_id, e.video_id, e.score
                )));
            }
            if seen
                .insert((e.subject_id.clone(), e.video_id.clone()), ())
                .is_some()
            {
                return Err(Error::Schema(format!(
                    "duplicate rating for subject {:?} video {:?}",
                    e.subject_id, e.video_id
                )));
            }
        }
        if entries.is_empty() {
            return Err(Error::Schema("rating matrix has no entries".into()));
        }
        let mut subjects: Vec<String> = entries.iter().map(|e| e.subject_id.clone()).collect();
        subjects.sort();
        subjects.dedup();
        let mut videos: Vec<String> = entries.iter().map(|e| e.video_id.clone()).collect();
        videos.sort();
        videos.dedup();
        Ok(RatingMatrix {
            entries,
            subjects,
            videos,
        })
    }

    /// Parse `subject_id,video_id,session,score` CSV.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut lines = numbered_rows(text);
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Schema(format!("{}: empty ratings file", source)))?;
        if header.trim() != "subject_id,video_id,session,score" {
            return Err(Error::Schema(format!(
                "{}:1: expected header subject_id,video_id,session,score",
                source
            )));
        }
        let mut entries = Vec::new();
        for (lineno, line) in lines {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::Schema(format!(
                    "{}:{}: expected 4 fields, got {}",
                    source,
                    lineno,
                    fields.len()
                )));
            }
            let session: u8 = fields[2].trim().parse().map_err(|_| {
                Error::Schema(format!(
                    "{}:{}:3: bad session {:?}",
                    source, lineno, fields[2]
                ))
            })?;
            let score: f64 = fields[3].trim().parse().map_err(|_| {
                Error::Schema(format!("{}:{}:4: bad score {:?}", source, lineno, fields[3]))
            })?;
            entries.push(RatingEntry {
                subject_id: fields[0].trim().to_string(),
                video_id: fields[1].trim().to_string(),
                session,
                score,
            });
        }
        Self::from_entries(entries).map_err(|e| match e {
            Error::Schema(msg) => Error::Schema(format!("{}: {}", source, msg)),
            other => other,
        })
    }

    pub fn entries(&self) -> &[RatingEntry] {
        &self.entries
    }

    /// Sorted unique subject ids.
    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    /// Sorted unique video ids.
    pub fn videos(&self) -> &[String] {
        &self.videos
    }

    pub fn ratings_of_video(&self, video_id: &str) -> Vec<&RatingEntry> {
        self.entries
            .iter()
            .filter(|e| e.video_id == video_id)
            .collect()
    }
}
