//! Provenance comment lines: tool version, resolved configuration, and
//! hashes of every input file. No timestamps, so identical runs produce
//! identical outputs.

use std::fmt::Write as _;
use std::path::Path;

use gamevqa_core::Result;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct Provenance {
    config: Vec<(String, String)>,
    inputs: Vec<(String, String)>,
}

impl Provenance {
    pub fn new() -> Self {
        Provenance {
            config: Vec::new(),
            inputs: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn input(&mut self, path: &Path) -> Result<&mut Self> {
        let bytes = std::fs::read(path)?;
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.inputs.push((name, short_hash(&bytes)));
        Ok(self)
    }

    /// The comment body (without the leading `#`).
    pub fn line(&self) -> String {
        let mut cfg = String::new();
        for (k, v) in &self.config {
            if !cfg.is_empty() {
                cfg.push(' ');
            }
            let _ = write!(cfg, "{}={}", k, v);
        }
        let cfg_hash = short_hash(cfg.as_bytes());
        let mut out = format!("gamevqa {} config={} [{}]", VERSION, cfg_hash, cfg);
        if !self.inputs.is_empty() {
            out.push_str(" inputs=");
            for (i, (name, hash)) in self.inputs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}:{}", name, hash);
            }
        }
        out
    }
}

fn short_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(16);
    for b in &digest[..8] {
        let _ = write!(out, "{:02x}", b);
    }
    out
}
