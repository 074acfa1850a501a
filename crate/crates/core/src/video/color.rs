//! Luma extraction, frame differencing and colorspace conversions.
//!
//! All YCbCr <-> RGB math uses the BT.601 matrix regardless of resolution so
//! that features stay comparable across clips. CIELAB assumes sRGB primaries
//! with a D65 white point.

use super::{Frame, PixelPlane, Range};
use crate::error::{Error, Result};

const KR: f64 = 0.299;
const KB: f64 = 0.114;

/// Luminance plane mapped to [0, 255] reals; limited-range input is
/// stretched via (Y - 16) * 255 / 219 and clamped.
pub fn luma(frame: &Frame) -> PixelPlane {
    match frame.range {
        Range::Full => frame.y.clone(),
        Range::Limited => frame
            .y
            .map(|v| ((v - 16.0) * 255.0 / 219.0).clamp(0.0, 255.0)),
    }
}

/// Nearest-neighbor upsampling to the given dimensions.
pub fn upsample_nearest(plane: &PixelPlane, width: usize, height: usize) -> PixelPlane {
    if plane.width() == width && plane.height() == height {
        return plane.clone();
    }
    PixelPlane::from_fn(width, height, |row, col| {
        let src_row = (row * plane.height()) / height;
        let src_col = (col * plane.width()) / width;
        plane.at(src_row, src_col)
    })
}

/// BT.601 YCbCr -> RGB, channels clamped to [0, 255]. Chroma planes are
/// upsampled to luma size by nearest neighbor first.
pub fn to_rgb(frame: &Frame) -> [PixelPlane; 3] {
    let (w, h) = (frame.width(), frame.height());
    let y = luma(frame);
    let cb = upsample_nearest(&frame.cb, w, h);
    let cr = upsample_nearest(&frame.cr, w, h);
    let chroma_scale = match frame.range {
        Range::Full => 1.0,
        Range::Limited => 255.0 / 224.0,
    };
    let kg = 1.0 - KR - KB;
    let mut r = Vec::with_capacity(w * h);
    let mut g = Vec::with_capacity(w * h);
    let mut b = Vec::with_capacity(w * h);
    for row in 0..h {
        for col in 0..w {
            let yv = y.at(row, col);
            let pb = (cb.at(row, col) - 128.0) * chroma_scale;
            let pr = (cr.at(row, col) - 128.0) * chroma_scale;
            r.push((yv + 2.0 * (1.0 - KR) * pr).clamp(0.0, 255.0));
            g.push(
                (yv - 2.0 * KB * (1.0 - KB) / kg * pb - 2.0 * KR * (1.0 - KR) / kg * pr)
                    .clamp(0.0, 255.0),
            );
            b.push((yv + 2.0 * (1.0 - KB) * pb).clamp(0.0, 255.0));
        }
    }
    [
        PixelPlane::new(w, h, r).unwrap(),
        PixelPlane::new(w, h, g).unwrap(),
        PixelPlane::new(w, h, b).unwrap(),
    ]
}

fn srgb_to_linear(c: f64) -> f64 {
    let c = c / 255.0;
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// sRGB -> CIELAB (D65). Returns true L*, a*, b* values; rescaling to
/// [0, 255] happens in the feature extractor.
pub fn rgb_to_lab(r: &PixelPlane, g: &PixelPlane, b: &PixelPlane) -> Result<[PixelPlane; 3]> {
    check_same_dims(r, g, b)?;
    let (w, h) = (r.width(), r.height());
    let (xn, yn, zn) = (0.95047, 1.0, 1.08883);
    let mut lp = Vec::with_capacity(w * h);
    let mut ap = Vec::with_capacity(w * h);
    let mut bp = Vec::with_capacity(w * h);
    for i in 0..w * h {
        let rl = srgb_to_linear(r.samples()[i]);
        let gl = srgb_to_linear(g.samples()[i]);
        let bl = srgb_to_linear(b.samples()[i]);
        let x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
        let y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
        let z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
        let (fx, fy, fz) = (lab_f(x / xn), lab_f(y / yn), lab_f(z / zn));
        lp.push(116.0 * fy - 16.0);
        ap.push(500.0 * (fx - fy));
        bp.push(200.0 * (fy - fz));
    }
    Ok([
        PixelPlane::new(w, h, lp).unwrap(),
        PixelPlane::new(w, h, ap).unwrap(),
        PixelPlane::new(w, h, bp).unwrap(),
    ])
}

/// RGB -> HSV with H in [0, 360), S and V in [0, 1].
pub fn rgb_to_hsv(r: &PixelPlane, g: &PixelPlane, b: &PixelPlane) -> Result<[PixelPlane; 3]> {
    check_same_dims(r, g, b)?;
    let (w, h) = (r.width(), r.height());
    let mut hp = Vec::with_capacity(w * h);
    let mut sp = Vec::with_capacity(w * h);
    let mut vp = Vec::with_capacity(w * h);
    for i in 0..w * h {
        let (rv, gv, bv) = (
            r.samples()[i] / 255.0,
            g.samples()[i] / 255.0,
            b.samples()[i] / 255.0,
        );
        let max = rv.max(gv).max(bv);
        let min = rv.min(gv).min(bv);
        let delta = max - min;
        let hue = if delta == 0.0 {
            0.0
        } else if max == rv {
            60.0 * ((gv - bv) / delta).rem_euclid(6.0)
        } else if max == gv {
            60.0 * ((bv - rv) / delta + 2.0)
        } else {
            60.0 * ((rv - gv) / delta + 4.0)
        };
        hp.push(if hue >= 360.0 { hue - 360.0 } else { hue });
        sp.push(if max == 0.0 { 0.0 } else { delta / max });
        vp.push(max);
    }
    Ok([
        PixelPlane::new(w, h, hp).unwrap(),
        PixelPlane::new(w, h, sp).unwrap(),
        PixelPlane::new(w, h, vp).unwrap(),
    ])
}

/// Elementwise difference of two equally sized planes.
pub fn frame_diff(current: &PixelPlane, next: &PixelPlane) -> Result<PixelPlane> {
    if current.width() != next.width() || current.height() != next.height() {
        return Err(Error::Dimension(format!(
            "frame difference of {}x{} and {}x{}",
            current.width(),
            current.height(),
            next.width(),
            next.height()
        )));
    }
    let samples = current
        .samples()
        .iter()
        .zip(next.samples())
        .map(|(&a, &b)| a - b)
        .collect();
    PixelPlane::new(current.width(), current.height(), samples)
}

fn check_same_dims(r: &PixelPlane, g: &PixelPlane, b: &PixelPlane) -> Result<()> {
    if r.width() != g.width()
        || r.width() != b.width()
        || r.height() != g.height()
        || r.height() != b.height()
    {
        return Err(Error::Dimension("channel planes differ in size".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::video::Subsampling;

    fn full_frame(y: f64, cb: f64, cr: f64) -> Frame {
        Frame::new(
            PixelPlane::constant(2, 2, y),
            PixelPlane::constant(2, 2, cb),
            PixelPlane::constant(2, 2, cr),
            Subsampling::S444,
            Range::Full,
        )
        .unwrap()
    }

    // independent single-pixel reference for the BT.601 full-range inverse
    fn bt601_full_ref(y: f64, cb: f64, cr: f64) -> (f64, f64, f64) {
        let r = y + 1.402 * (cr - 128.0);
        let g = y - 0.344136 * (cb - 128.0) - 0.714136 * (cr - 128.0);
        let b = y + 1.772 * (cb - 128.0);
        (r, g, b)
    }

    #[test]
    fn luma_maps_limited_range() {
        let mut f = full_frame(128.0, 128.0, 128.0);
        assert_eq!(luma(&f).at(0, 0), 128.0);
        f.range = Range::Limited;
        f.y = PixelPlane::constant(2, 2, 16.0);
        assert_eq!(luma(&f).at(0, 0), 0.0);
        f.y = PixelPlane::constant(2, 2, 235.0);
        assert_eq!(luma(&f).at(0, 0), 255.0);
    }

    #[test]
    fn achromatic_extremes() {
        let [r, g, b] = to_rgb(&full_frame(255.0, 128.0, 128.0));
        assert_eq!((r.at(0, 0), g.at(0, 0), b.at(0, 0)), (255.0, 255.0, 255.0));
        let [r, g, b] = to_rgb(&full_frame(0.0, 128.0, 128.0));
        assert_eq!((r.at(0, 0), g.at(0, 0), b.at(0, 0)), (0.0, 0.0, 0.0));
    }

    #[test]
    fn bt601_inverse_matches_reference() {
        // full-range decode of the studio-swing red triple
        let [r, g, b] = to_rgb(&full_frame(81.0, 90.0, 240.0));
        // the reference uses the usual rounded literals, hence the loose band
        let (er, eg, eb) = bt601_full_ref(81.0, 90.0, 240.0);
        assert!((r.at(0, 0) - er).abs() < 1e-3);
        assert!((g.at(0, 0) - eg).abs() < 1e-3);
        assert!((b.at(0, 0) - eb).abs() < 1e-3);
        // frozen values from the reference matrix
        assert!((r.at(0, 0) - 238.024).abs() < 0.05);
        assert!((g.at(0, 0) - 14.094).abs() < 0.05);
        assert!((b.at(0, 0) - 13.664).abs() < 0.05);
    }

    #[test]
    fn gray_has_zero_chroma_and_saturation() {
        let c = PixelPlane::constant(3, 3, 77.0);
        let [l, a, b] = rgb_to_lab(&c, &c, &c).unwrap();
        // the sRGB matrix rows sum to 1 only within their printed precision
        assert!(a.samples().iter().all(|v| v.abs() < 1e-4));
        assert!(b.samples().iter().all(|v| v.abs() < 1e-4));
        assert!(l.at(0, 0) > 0.0);
        let [_, s, _] = rgb_to_hsv(&c, &c, &c).unwrap();
        assert!(s.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pure_red_landmarks() {
        let r = PixelPlane::constant(1, 1, 255.0);
        let z = PixelPlane::constant(1, 1, 0.0);
        let [h, s, v] = rgb_to_hsv(&r, &z, &z).unwrap();
        assert_eq!((h.at(0, 0), s.at(0, 0), v.at(0, 0)), (0.0, 1.0, 1.0));
        let [l, a, b] = rgb_to_lab(&r, &z, &z).unwrap();
        assert!((l.at(0, 0) - 53.24).abs() < 0.01, "L = {}", l.at(0, 0));
        assert!((a.at(0, 0) - 80.09).abs() < 0.01, "a = {}", a.at(0, 0));
        assert!((b.at(0, 0) - 67.20).abs() < 0.01, "b = {}", b.at(0, 0));
    }

    #[test]
    fn frame_diff_basics() {
        let a = PixelPlane::constant(4, 4, 5.0);
        let b = PixelPlane::constant(4, 4, 3.0);
        let d = frame_diff(&a, &b).unwrap();
        assert!(d.samples().iter().all(|&v| v == 2.0));
        let zero = frame_diff(&a, &a).unwrap();
        assert!(zero.samples().iter().all(|&v| v == 0.0));
        let c = PixelPlane::constant(4, 5, 0.0);
        assert!(matches!(frame_diff(&a, &c), Err(Error::Dimension(_))));
    }
}
