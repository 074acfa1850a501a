//! Clip manifests: `video_id,path,width,height,fps` rows naming the media to
//! process.

use std::path::{Path, PathBuf};

use super::{parse_y4m, parse_yuv420, VideoClip};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ManifestRow {
    pub video_id: String,
    pub path: PathBuf,
    pub width: usize,
    pub height: usize,
    pub fps_num: u32,
    pub fps_den: u32,
}

#[derive(Debug, Clone)]
pub struct ClipManifest {
    rows: Vec<ManifestRow>,
}

impl ClipManifest {
    /// Parse manifest CSV text. `name` is used in error messages.
    pub fn parse(text: &str, name: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Schema(format!("{}: empty manifest", name)))?;
        if header.trim() != "video_id,path,width,height,fps" {
            return Err(Error::Schema(format!(
                "{}:1: expected header video_id,path,width,height,fps",
                name
            )));
        }
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::Schema(format!(
                    "{}:{}: expected 5 fields, got {}",
                    name,
                    lineno,
                    fields.len()
                )));
            }
            let col = |i: usize| format!("{}:{}:{}", name, lineno, i + 1);
            let video_id = fields[0].trim().to_string();
            if video_id.is_empty() {
                return Err(Error::Schema(format!("{}: empty video_id", col(0))));
            }
            let width = fields[2]
                .trim()
                .parse()
                .map_err(|_| Error::Schema(format!("{}: bad width {:?}", col(2), fields[2])))?;
            let height = fields[3]
                .trim()
                .parse()
                .map_err(|_| Error::Schema(format!("{}: bad height {:?}", col(3), fields[3])))?;
            let (fps_num, fps_den) = parse_fps(fields[4].trim())
                .ok_or_else(|| Error::Schema(format!("{}: bad fps {:?}", col(4), fields[4])))?;
            if rows.iter().any(|r: &ManifestRow| r.video_id == video_id) {
                return Err(Error::Schema(format!(
                    "{}: duplicate video_id {:?}",
                    col(0),
                    video_id
                )));
            }
            rows.push(ManifestRow {
                video_id,
                path: PathBuf::from(fields[1].trim()),
                width,
                height,
                fps_num,
                fps_den,
            });
        }
        Ok(ClipManifest { rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn rows(&self) -> &[ManifestRow] {
        &self.rows
    }
}

/// Decode the clip a manifest row points at. Y4M streams carry their own
/// geometry, which must agree with the manifest; raw `.yuv` payloads take
/// theirs from the row.
pub fn load_clip(row: &ManifestRow, base_dir: &Path) -> Result<VideoClip> {
    let path = if row.path.is_absolute() {
        row.path.clone()
    } else {
        base_dir.join(&row.path)
    };
    let bytes = std::fs::read(&path)?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let clip = match ext.as_str() {
        "y4m" => {
            let clip = parse_y4m(&bytes, &row.video_id)?;
            if clip.width() != row.width || clip.height() != row.height {
                return Err(Error::Schema(format!(
                    "{}: stream is {}x{} but manifest declares {}x{}",
                    row.video_id,
                    clip.width(),
                    clip.height(),
                    row.width,
                    row.height
                )));
            }
            let declared = f64::from(row.fps_num) / f64::from(row.fps_den);
            if (clip.fps() - declared).abs() > 0.01 {
                return Err(Error::Schema(format!(
                    "{}: stream fps {} but manifest declares {}",
                    row.video_id,
                    clip.fps(),
                    declared
                )));
            }
            clip
        }
        "yuv" => parse_yuv420(
            &bytes,
            &row.video_id,
            row.width,
            row.height,
            row.fps_num,
            row.fps_den,
        )?,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: unknown extension {:?} (expected .y4m or .yuv)",
                row.video_id, other
            )))
        }
    };
    Ok(clip)
}

/// Accepts integers ("30"), decimals ("29.97") and ratios ("30000:1001").
fn parse_fps(text: &str) -> Option<(u32, u32)> {
    if let Some((num, den)) = text.split_once(':') {
        let (num, den) = (num.parse().ok()?, den.parse().ok()?);
        if num == 0 || den == 0 {
            return None;
        }
        return Some((num, den));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 6 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let scale = 10u32.pow(frac.len() as u32);
        let int: u32 = int.parse().ok()?;
        let frac: u32 = frac.parse().ok()?;
        let num = int.checked_mul(scale)?.checked_add(frac)?;
        if num == 0 {
            return None;
        }
        return Some((num, scale));
    }
    let num: u32 = text.parse().ok()?;
    if num == 0 {
        None
    } else {
        Some((num, 1))
    }
}
