//! File-backed data tables shared by the CLI and the evaluation protocols.
//!
//! All files are plain UTF-8 CSV with LF line endings. Lines starting with
//! `#` are provenance comments and are skipped on read. Floats are written
//! in shortest round-trip decimal form so outputs diff cleanly.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// `video_id,<name_1>,...,<name_k>` rows of real-valued features. Used for
/// both NSS features and externally supplied deep features (the header
/// declares the dimension).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    feature_names: Vec<String>,
    ids: Vec<String>,
    rows: Vec<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl FeatureTable {
    pub fn new(feature_names: Vec<String>) -> Self {
        FeatureTable {
            feature_names,
            ids: Vec::new(),
            rows: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn push(&mut self, id: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let id = id.into();
        if values.len() != self.feature_names.len() {
            return Err(Error::Schema(format!(
                "row {:?} has {} values, expected {}",
                id,
                values.len(),
                self.feature_names.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "row {:?}, feature {:?}: non-finite value",
                id, self.feature_names[bad]
            )));
        }
        if self.index.contains_key(&id) {
            return Err(Error::Schema(format!("duplicate video_id {:?}", id)));
        }
        self.index.insert(id.clone(), self.rows.len());
        self.ids.push(id);
        self.rows.push(values);
        Ok(())
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut lines = numbered_rows(text);
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Schema(format!("{}: empty feature file", source)))?;
        let mut cols = header.split(',');
        if cols.next() != Some("video_id") {
            return Err(Error::Schema(format!(
                "{}:1:1: first column must be video_id",
                source
            )));
        }
        let feature_names: Vec<String> = cols.map(|c| c.trim().to_string()).collect();
        if feature_names.is_empty() || feature_names.iter().any(|n| n.is_empty()) {
            return Err(Error::Schema(format!(
                "{}:1: feature columns must be non-empty names",
                source
            )));
        }
        let mut table = FeatureTable::new(feature_names);
        for (lineno, line) in lines {
            let mut fields = line.split(',');
            let id = fields.next().unwrap_or("").trim();
            if id.is_empty() {
                return Err(Error::Schema(format!(
                    "{}:{}:1: empty video_id",
                    source, lineno
                )));
            }
            let mut values = Vec::with_capacity(table.feature_names.len());
            for (i, field) in fields.enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::Schema(format!(
                        "{}:{}:{}: bad number {:?}",
                        source,
                        lineno,
                        i + 2,
                        field
                    ))
                })?;
                values.push(v);
            }
            table.push(id, values).map_err(|e| {
                Error::Schema(format!("{}:{}: {}", source, lineno, e))
            })?;
        }
        Ok(table)
    }

    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(c) = comment {
            out.push('#');
            out.push(' ');
            out.push_str(c);
            out.push('\n');
        }
        out.push_str("video_id");
        for name in &self.feature_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (id, row) in self.ids.iter().zip(&self.rows) {
            out.push_str(id);
            for v in row {
                out.push(',');
                out.push_str(&format_float(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.index.get(id).map(|&i| self.rows[i].as_slice())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Data rows of a CSV body: (1-based line number, line), comments and blank
/// lines skipped.
pub(crate) fn numbered_rows(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
}

/// Shortest decimal form that parses back to the same f64.
pub fn format_float(v: f64) -> String {
    let mut s = format!("{}", v);
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}
