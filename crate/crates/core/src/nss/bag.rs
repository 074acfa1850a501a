//! The pooled per-clip feature bag.
//!
//! Frames are sampled at one per second (at least 8, evenly spaced, capped at
//! what the clip has). Each sampled frame contributes BRISQUE-36 on four
//! channels: mapped luma, a* and b* (shifted by +128), and saturation
//! (scaled by 255), all on the [0, 255] scale. Temporal statistics come from
//! single-scale features of the luma difference planes, sampled the same way
//! over the n-1 available differences. Every per-frame feature is pooled by
//! mean and population std across its samples; SI and TI over all frames
//! close the vector at 326 entries.

use once_cell::sync::Lazy;
use rayon::prelude::*;

use super::brisque::{brisque_frame_features, brisque_single_scale, ORIENTATIONS};
use super::siti::siti;
use crate::error::{Error, Result};
use crate::video::{frame_diff, luma, rgb_to_hsv, rgb_to_lab, to_rgb, Frame, PixelPlane, VideoClip};

pub const NSS_FEATURE_COUNT: usize = 326;

const CHANNELS: [&str; 4] = ["y", "a", "b", "s"];

/// Named, ordered real-valued features for one video.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    names: Vec<String>,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if names.len() != values.len() {
            return Err(Error::Schema(format!(
                "{} names but {} values",
                names.len(),
                values.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("duplicate feature name {:?}", name)));
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "feature {:?} is not finite",
                names[i]
            )));
        }
        Ok(FeatureVector { names, values })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }
}

fn base_feature_names() -> Vec<String> {
    let mut names = Vec::new();
    let mut push_block = |prefix: &str| {
        names.push(format!("{prefix}_ggd_alpha"));
        names.push(format!("{prefix}_ggd_sigma_sq"));
        for o in ORIENTATIONS {
            for field in ["nu", "eta", "sigma_l_sq", "sigma_r_sq"] {
                names.push(format!("{prefix}_{o}_{field}"));
            }
        }
    };
    for chan in CHANNELS {
        push_block(&format!("{chan}_s1"));
        push_block(&format!("{chan}_s2"));
    }
    push_block("dy_s1");
    names
}

static FEATURE_NAMES: Lazy<Vec<String>> = Lazy::new(|| {
    let mut names = Vec::with_capacity(NSS_FEATURE_COUNT);
    for base in base_feature_names() {
        names.push(format!("{base}_mean"));
        names.push(format!("{base}_std"));
    }
    names.push("si".into());
    names.push("ti".into());
    names
});

/// The published column order of `features.csv`.
pub fn nss_feature_names() -> &'static [String] {
    &FEATURE_NAMES
}

/// Evenly spaced sample indices over 0..count-1.
fn sample_indices(count: usize, target: usize) -> Vec<usize> {
    let target = target.clamp(1, count);
    if target == 1 {
        return vec![0];
    }
    (0..target)
        .map(|k| {
            let pos = k as f64 * (count - 1) as f64 / (target - 1) as f64;
            pos.round() as usize
        })
        .collect()
}

fn sample_target(n_frames: usize, fps: f64) -> usize {
    let per_second = (n_frames as f64 / fps).round() as usize;
    per_second.max(8)
}

fn spatial_channels(frame: &Frame) -> Result<[PixelPlane; 4]> {
    let y = luma(frame);
    let [r, g, b] = to_rgb(frame);
    let [_, astar, bstar] = rgb_to_lab(&r, &g, &b)?;
    let [_, sat, _] = rgb_to_hsv(&r, &g, &b)?;
    Ok([
        y,
        astar.map(|v| (v + 128.0).clamp(0.0, 255.0)),
        bstar.map(|v| (v + 128.0).clamp(0.0, 255.0)),
        sat.map(|v| (v * 255.0).clamp(0.0, 255.0)),
    ])
}

fn pool(per_sample: &[Vec<f64>], out: &mut Vec<f64>) {
    let n = per_sample.len() as f64;
    for i in 0..per_sample[0].len() {
        let mean = per_sample.iter().map(|row| row[i]).sum::<f64>() / n;
        let var = per_sample
            .iter()
            .map(|row| (row[i] - mean) * (row[i] - mean))
            .sum::<f64>()
            / n;
        out.push(mean);
        out.push(var.sqrt());
    }
}

/// Extract the full 326-dimensional NSS bag of a clip.
pub fn nss_bag(clip: &VideoClip) -> Result<FeatureVector> {
    let n = clip.frames().len();
    if n < 2 {
        return Err(Error::InsufficientFrames(format!(
            "NSS bag needs at least 2 frames, clip {:?} has {}",
            clip.id(),
            n
        )));
    }
    let target = sample_target(n, clip.fps());

    let spatial_rows: Vec<Vec<f64>> = sample_indices(n, target)
        .par_iter()
        .map(|&idx| {
            let channels = spatial_channels(&clip.frames()[idx])?;
            let mut row = Vec::with_capacity(4 * 36);
            for plane in &channels {
                row.extend(brisque_frame_features(plane)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let temporal_rows: Vec<Vec<f64>> = sample_indices(n - 1, target)
        .par_iter()
        .map(|&idx| {
            let a = luma(&clip.frames()[idx]);
            let b = luma(&clip.frames()[idx + 1]);
            brisque_single_scale(&frame_diff(&a, &b)?)
        })
        .collect::<Result<_>>()?;

    // base order is all spatial features then the temporal block, matching
    // base_feature_names; pooling interleaves mean/std per feature
    let mut values = Vec::with_capacity(NSS_FEATURE_COUNT);
    pool(&spatial_rows, &mut values);
    pool(&temporal_rows, &mut values);

    let s = siti(clip)?;
    values.push(s.si);
    values.push(s.ti);

    FeatureVector::new(FEATURE_NAMES.clone(), values)
}
