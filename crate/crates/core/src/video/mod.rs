//! Video containers: planar frames, clips, Y4M / raw YUV ingestion and
//! colorspace conversions.
//!
//! Everything here is immutable after construction; clips and planes can be
//! shared freely across threads.

mod color;
mod manifest;
mod y4m;

pub use color::{frame_diff, luma, rgb_to_hsv, rgb_to_lab, to_rgb, upsample_nearest};
pub use manifest::{load_clip, ClipManifest, ManifestRow};
pub use y4m::{parse_y4m, parse_yuv420, write_y4m};

use crate::error::{Error, Result};

/// A single image plane of real-valued samples, row-major.
///
/// Decoded video planes hold values in [0, 255]; derived planes (frame
/// differences, filter responses) may be signed.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelPlane {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl PixelPlane {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != width * height {
            return Err(Error::Dimension(format!(
                "plane of {}x{} requires {} samples, got {}",
                width,
                height,
                width * height,
                samples.len()
            )));
        }
        Ok(PixelPlane {
            width,
            height,
            samples,
        })
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Self {
        PixelPlane {
            width,
            height,
            samples: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut samples = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                samples.push(f(row, col));
            }
        }
        PixelPlane {
            width,
            height,
            samples,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.samples[row * self.width + col]
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> PixelPlane {
        PixelPlane {
            width: self.width,
            height: self.height,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Mean and population (divide-by-N) standard deviation of all samples.
    pub fn mean_std(&self) -> (f64, f64) {
        let n = self.samples.len() as f64;
        let mean = self.samples.iter().sum::<f64>() / n;
        let var = self
            .samples
            .iter()
            .map(|&v| (v - mean) * (v - mean))
            .sum::<f64>()
            / n;
        (mean, var.sqrt())
    }
}

/// Chroma subsampling of a decoded frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsampling {
    S420,
    S422,
    S444,
}

impl Subsampling {
    pub fn chroma_dims(&self, width: usize, height: usize) -> (usize, usize) {
        match self {
            Subsampling::S420 => (width / 2, height / 2),
            Subsampling::S422 => (width / 2, height),
            Subsampling::S444 => (width, height),
        }
    }
}

/// Sample range convention of a decoded frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Range {
    /// Studio swing: luma in [16, 235], chroma in [16, 240].
    Limited,
    /// Full swing: all planes in [0, 255].
    Full,
}

/// One decoded YCbCr frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub y: PixelPlane,
    pub cb: PixelPlane,
    pub cr: PixelPlane,
    pub subsampling: Subsampling,
    pub range: Range,
}

impl Frame {
    pub fn new(
        y: PixelPlane,
        cb: PixelPlane,
        cr: PixelPlane,
        subsampling: Subsampling,
        range: Range,
    ) -> Result<Self> {
        let (cw, ch) = subsampling.chroma_dims(y.width(), y.height());
        for (name, p) in [("cb", &cb), ("cr", &cr)] {
            if p.width() != cw || p.height() != ch {
                return Err(Error::Dimension(format!(
                    "{} plane is {}x{}, expected {}x{} for {:?} chroma of a {}x{} frame",
                    name,
                    p.width(),
                    p.height(),
                    cw,
                    ch,
                    subsampling,
                    y.width(),
                    y.height()
                )));
            }
        }
        Ok(Frame {
            y,
            cb,
            cr,
            subsampling,
            range,
        })
    }

    /// Gray full-range frame, handy in tests and synthetic clips.
    pub fn gray(width: usize, height: usize, value: f64) -> Self {
        Frame {
            y: PixelPlane::constant(width, height, value),
            cb: PixelPlane::constant(width, height, 128.0),
            cr: PixelPlane::constant(width, height, 128.0),
            subsampling: Subsampling::S444,
            range: Range::Full,
        }
    }

    /// Full-range 4:4:4 frame from a luma plane, neutral chroma.
    pub fn from_luma(y: PixelPlane) -> Self {
        let (w, h) = (y.width(), y.height());
        Frame {
            y,
            cb: PixelPlane::constant(w, h, 128.0),
            cr: PixelPlane::constant(w, h, 128.0),
            subsampling: Subsampling::S444,
            range: Range::Full,
        }
    }

    pub fn width(&self) -> usize {
        self.y.width()
    }

    pub fn height(&self) -> usize {
        self.y.height()
    }
}

/// An ordered sequence of frames with a frame rate.
#[derive(Debug, Clone)]
pub struct VideoClip {
    id: String,
    frames: Vec<Frame>,
    fps_num: u32,
    fps_den: u32,
}

impl VideoClip {
    pub fn new(
        id: impl Into<String>,
        frames: Vec<Frame>,
        fps_num: u32,
        fps_den: u32,
    ) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::InsufficientFrames("clip has no frames".into()));
        }
        if fps_num == 0 || fps_den == 0 {
            return Err(Error::Input(format!(
                "frame rate {}:{} is not positive",
                fps_num, fps_den
            )));
        }
        let first = &frames[0];
        for (i, f) in frames.iter().enumerate() {
            if f.width() != first.width()
                || f.height() != first.height()
                || f.subsampling != first.subsampling
                || f.range != first.range
            {
                return Err(Error::Dimension(format!(
                    "frame {} differs from frame 0 in dimensions, subsampling or range",
                    i
                )));
            }
        }
        Ok(VideoClip {
            id: id.into(),
            frames,
            fps_num,
            fps_den,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn fps(&self) -> f64 {
        f64::from(self.fps_num) / f64::from(self.fps_den)
    }

    pub fn fps_rational(&self) -> (u32, u32) {
        (self.fps_num, self.fps_den)
    }

    pub fn width(&self) -> usize {
        self.frames[0].width()
    }

    pub fn height(&self) -> usize {
        self.frames[0].height()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_rejects_bad_sample_count() {
        assert!(matches!(
            PixelPlane::new(4, 4, vec![0.0; 15]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn frame_checks_chroma_dims() {
        let y = PixelPlane::constant(4, 4, 0.0);
        let bad = PixelPlane::constant(3, 2, 128.0);
        let good = PixelPlane::constant(2, 2, 128.0);
        assert!(Frame::new(
            y.clone(),
            bad,
            good.clone(),
            Subsampling::S420,
            Range::Full
        )
        .is_err());
        assert!(Frame::new(y, good.clone(), good, Subsampling::S420, Range::Full).is_ok());
    }

    #[test]
    fn clip_requires_uniform_frames() {
        let frames = vec![Frame::gray(4, 4, 10.0), Frame::gray(6, 4, 10.0)];
        assert!(matches!(
            VideoClip::new("v", frames, 30, 1),
            Err(Error::Dimension(_))
        ));
    }
}
