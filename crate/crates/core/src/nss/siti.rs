//! Spatial and temporal information: the max-over-time spatial standard
//! deviation of the Sobel magnitude, and of successive frame differences.
//!
//! Standard deviations here are population (divide-by-N), taken over the
//! filter's interior output for SI and over all pixels for TI. Both use the
//! full-range mapped luminance of every frame.

use crate::error::{Error, Result};
use crate::video::{frame_diff, luma, PixelPlane, VideoClip};

/// Per-clip spatial/temporal richness summary. Both are zero for constant
/// clips.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiTi {
    pub si: f64,
    pub ti: f64,
}

/// Gradient magnitude sqrt(Gx^2 + Gy^2) with the standard 3x3 Sobel kernels,
/// computed on the (W-2)x(H-2) interior.
pub fn sobel_magnitude(plane: &PixelPlane) -> Result<PixelPlane> {
    let (w, h) = (plane.width(), plane.height());
    if w < 3 || h < 3 {
        return Err(Error::Dimension(format!(
            "Sobel filter needs at least 3x3, got {}x{}",
            w, h
        )));
    }
    let mut out = Vec::with_capacity((w - 2) * (h - 2));
    for row in 1..h - 1 {
        for col in 1..w - 1 {
            let p = |dr: isize, dc: isize| {
                plane.at(
                    (row as isize + dr) as usize,
                    (col as isize + dc) as usize,
                )
            };
            let gx = p(-1, 1) + 2.0 * p(0, 1) + p(1, 1) - p(-1, -1) - 2.0 * p(0, -1) - p(1, -1);
            let gy = p(1, -1) + 2.0 * p(1, 0) + p(1, 1) - p(-1, -1) - 2.0 * p(-1, 0) - p(-1, 1);
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    PixelPlane::new(w - 2, h - 2, out)
}

/// Maximum over frames of the spatial std of the Sobel magnitude of the luma.
pub fn spatial_info(clip: &VideoClip) -> Result<f64> {
    let mut best: f64 = 0.0;
    for frame in clip.frames() {
        let mag = sobel_magnitude(&luma(frame))?;
        let (_, std) = mag.mean_std();
        best = best.max(std);
    }
    Ok(best)
}

/// Maximum over n of the spatial std of the frame difference F_n - F_{n+1}.
pub fn temporal_info(clip: &VideoClip) -> Result<f64> {
    if clip.frames().len() < 2 {
        return Err(Error::InsufficientFrames(format!(
            "temporal information needs at least 2 frames, clip {:?} has {}",
            clip.id(),
            clip.frames().len()
        )));
    }
    let lumas: Vec<PixelPlane> = clip.frames().iter().map(luma).collect();
    let mut best: f64 = 0.0;
    for pair in lumas.windows(2) {
        let diff = frame_diff(&pair[0], &pair[1])?;
        let (_, std) = diff.mean_std();
        best = best.max(std);
    }
    Ok(best)
}

pub fn siti(clip: &VideoClip) -> Result<SiTi> {
    Ok(SiTi {
        si: spatial_info(clip)?,
        ti: temporal_info(clip)?,
    })
}
