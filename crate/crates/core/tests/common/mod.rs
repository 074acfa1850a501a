//! Shared test fixtures: procedural clips and a blur+noise distortion
//! ladder with pseudo-MOS labels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use gamevqa_core::video::{Frame, PixelPlane, Range, Subsampling, VideoClip};

/// Smooth value-noise field: a coarse random grid, bilinearly upsampled.
fn value_noise(rng: &mut ChaCha8Rng, width: usize, height: usize, cells: usize) -> PixelPlane {
    let grid: Vec<Vec<f64>> = (0..cells + 1)
        .map(|_| (0..cells + 1).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    PixelPlane::from_fn(width, height, |row, col| {
        let fy = row as f64 / height as f64 * cells as f64;
        let fx = col as f64 / width as f64 * cells as f64;
        let (y0, x0) = (fy as usize, fx as usize);
        let (ty, tx) = (fy - y0 as f64, fx - x0 as f64);
        let v00 = grid[y0][x0];
        let v01 = grid[y0][x0 + 1];
        let v10 = grid[y0 + 1][x0];
        let v11 = grid[y0 + 1][x0 + 1];
        (v00 * (1.0 - tx) + v01 * tx) * (1.0 - ty) + (v10 * (1.0 - tx) + v11 * tx) * ty
    })
}

/// A textured clip with global motion: value-noise background, a drifting
/// grating, fine static texture, and a moving bright block, plus smooth
/// chroma gradients so the color channels carry signal.
pub fn base_clip(seed: u64, width: usize, height: usize, n_frames: usize, fps: u32) -> VideoClip {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let background = value_noise(&mut rng, width, height, 6);
    let texture = PixelPlane::from_fn(width, height, |_, _| rng.random_range(-14.0..14.0));
    let freq_x = rng.random_range(0.02..0.12);
    let freq_y = rng.random_range(0.0..0.08);
    let speed = rng.random_range(0.05..0.3);
    let amp = rng.random_range(10.0..30.0);
    let block = rng.random_range(6..(width / 3).max(7));
    let block_speed = rng.random_range(0.5..2.0);
    let cb_slope = rng.random_range(-0.5..0.5);
    let cr_slope = rng.random_range(-0.5..0.5);

    let frames = (0..n_frames)
        .map(|n| {
            let t = n as f64;
            let bx = ((t * block_speed) as usize * 2) % (width - block);
            let by = ((t * block_speed * 0.7) as usize) % (height - block);
            let y = PixelPlane::from_fn(width, height, |row, col| {
                let mut v = 40.0 + 150.0 * background.at(row, col);
                v += amp
                    * (2.0 * std::f64::consts::PI
                        * (freq_x * col as f64 + freq_y * row as f64 + speed * t))
                        .sin();
                v += texture.at(row, col);
                if row >= by && row < by + block && col >= bx && col < bx + block {
                    v += 60.0;
                }
                v.clamp(0.0, 255.0)
            });
            let cb = PixelPlane::from_fn(width, height, |row, _| {
                (128.0 + cb_slope * row as f64).clamp(16.0, 240.0)
            });
            let cr = PixelPlane::from_fn(width, height, |_, col| {
                (128.0 + cr_slope * col as f64).clamp(16.0, 240.0)
            });
            Frame::new(y, cb, cr, Subsampling::S444, Range::Full).unwrap()
        })
        .collect();
    VideoClip::new(format!("clip{seed:03}"), frames, fps, 1).unwrap()
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as usize;
    let mut taps: Vec<f64> = (0..2 * radius + 1)
        .map(|i| {
            let x = i as f64 - radius as f64;
            (-x * x / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

fn blur_plane(plane: &PixelPlane, taps: &[f64]) -> PixelPlane {
    let r = taps.len() / 2;
    let (w, h) = (plane.width(), plane.height());
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    let horizontal = PixelPlane::from_fn(w, h, |row, col| {
        taps.iter()
            .enumerate()
            .map(|(k, &t)| t * plane.at(row, clamp(col as isize + k as isize - r as isize, w)))
            .sum()
    });
    PixelPlane::from_fn(w, h, |row, col| {
        taps.iter()
            .enumerate()
            .map(|(k, &t)| {
                t * horizontal.at(clamp(row as isize + k as isize - r as isize, h), col)
            })
            .sum()
    })
}

/// Distortion level 0 is pristine; level k applies Gaussian blur with
/// sigma = 0.7k and additive luma noise with sigma = 2.5k.
pub fn distort(clip: &VideoClip, level: usize, seed: u64) -> VideoClip {
    if level == 0 {
        return clip.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 2.5 * level as f64).unwrap();
    let taps = gaussian_kernel(0.7 * level as f64);
    let frames = clip
        .frames()
        .iter()
        .map(|f| {
            let blurred = blur_plane(&f.y, &taps);
            let mut samples = Vec::with_capacity(blurred.width() * blurred.height());
            for row in 0..blurred.height() {
                for col in 0..blurred.width() {
                    samples.push((blurred.at(row, col) + noise.sample(&mut rng)).clamp(0.0, 255.0));
                }
            }
            let y = PixelPlane::new(blurred.width(), blurred.height(), samples).unwrap();
            Frame::new(
                y,
                blur_plane(&f.cb, &taps),
                blur_plane(&f.cr, &taps),
                f.subsampling,
                f.range,
            )
            .unwrap()
        })
        .collect();
    let (num, den) = clip.fps_rational();
    VideoClip::new(format!("{}_l{}", clip.id(), level), frames, num, den).unwrap()
}

/// The full distortion ladder: `bases` base clips at 5 levels each, with
/// pseudo-MOS = 100 - 20 * level.
pub fn ladder(bases: usize, width: usize, height: usize, n_frames: usize) -> Vec<(VideoClip, f64)> {
    let mut out = Vec::with_capacity(bases * 5);
    for b in 0..bases {
        let base = base_clip(1000 + b as u64, width, height, n_frames, 30);
        for level in 0..5 {
            let clip = distort(&base, level, 5000 + (b * 5 + level) as u64);
            let clip = clip.with_id(format!("clip{b:02}_l{level}"));
            out.push((clip, 100.0 - 20.0 * level as f64));
        }
    }
    out
}
