//! Y4M (YUV4MPEG2) reader/writer and headerless planar YUV ingestion.
//!
//! Only 8-bit streams are supported. The colorspace tag decides both the
//! subsampling and the sample range: C420/C420mpeg2/C422 are limited range,
//! C420jpeg/C444 are full range, and a missing tag means 4:2:0 limited.

use super::{Frame, PixelPlane, Range, Subsampling, VideoClip};
use crate::error::{Error, Result};

const MAGIC: &[u8] = b"YUV4MPEG2";

/// Parse a whole Y4M stream into a clip with the given id.
pub fn parse_y4m(bytes: &[u8], id: &str) -> Result<VideoClip> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::Parse("missing YUV4MPEG2 magic".into()));
    }
    let header_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Parse("unterminated stream header".into()))?;
    let header = std::str::from_utf8(&bytes[MAGIC.len()..header_end])
        .map_err(|_| Error::Parse("stream header is not valid ASCII".into()))?;

    let mut width: Option<usize> = None;
    let mut height: Option<usize> = None;
    let mut fps: Option<(u32, u32)> = None;
    let mut colorspace: Option<&str> = None;
    for tag in header.split(' ').filter(|t| !t.is_empty()) {
        let (key, value) = tag.split_at(1);
        match key {
            "W" => width = Some(parse_dim(value, "W")?),
            "H" => height = Some(parse_dim(value, "H")?),
            "F" => fps = Some(parse_ratio(value)?),
            "I" => {
                if value != "p" && value != "?" {
                    return Err(Error::UnsupportedFormat(format!(
                        "interlaced stream (I{})",
                        value
                    )));
                }
            }
            "A" | "X" => {}
            "C" => colorspace = Some(value),
            _ => return Err(Error::Parse(format!("unknown header tag {:?}", tag))),
        }
    }
    let width = width.ok_or_else(|| Error::Parse("header missing W tag".into()))?;
    let height = height.ok_or_else(|| Error::Parse("header missing H tag".into()))?;
    let (fps_num, fps_den) = fps.ok_or_else(|| Error::Parse("header missing F tag".into()))?;
    if fps_num == 0 || fps_den == 0 {
        return Err(Error::Parse("frame rate must be positive".into()));
    }

    let (subsampling, range) = match colorspace.unwrap_or("420") {
        "420" | "420mpeg2" => (Subsampling::S420, Range::Limited),
        "420jpeg" => (Subsampling::S420, Range::Full),
        "422" => (Subsampling::S422, Range::Limited),
        "444" => (Subsampling::S444, Range::Full),
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "colorspace tag C{}",
                other
            )))
        }
    };
    if subsampling != Subsampling::S444 && (width % 2 != 0 || (subsampling == Subsampling::S420 && height % 2 != 0)) {
        return Err(Error::Parse(format!(
            "odd dimensions {}x{} with {:?} chroma",
            width, height, subsampling
        )));
    }

    let (cw, ch) = subsampling.chroma_dims(width, height);
    let frame_payload = width * height + 2 * cw * ch;
    let mut pos = header_end + 1;
    let mut frames = Vec::new();
    while pos < bytes.len() {
        let index = frames.len();
        pos = expect_frame_marker(bytes, pos, index)?;
        if bytes.len() < pos + frame_payload {
            return Err(Error::Parse(format!(
                "truncated plane data in frame {}",
                index
            )));
        }
        let y = decode_plane(&bytes[pos..pos + width * height], width, height, range, true);
        pos += width * height;
        let cb = decode_plane(&bytes[pos..pos + cw * ch], cw, ch, range, false);
        pos += cw * ch;
        let cr = decode_plane(&bytes[pos..pos + cw * ch], cw, ch, range, false);
        pos += cw * ch;
        frames.push(Frame::new(y, cb, cr, subsampling, range)?);
    }
    if frames.is_empty() {
        return Err(Error::Parse("stream contains no frames".into()));
    }
    VideoClip::new(id, frames, fps_num, fps_den)
}

/// Headerless planar 4:2:0 YUV (limited range), dimensions from the caller.
pub fn parse_yuv420(
    bytes: &[u8],
    id: &str,
    width: usize,
    height: usize,
    fps_num: u32,
    fps_den: u32,
) -> Result<VideoClip> {
    if width == 0 || height == 0 || width % 2 != 0 || height % 2 != 0 {
        return Err(Error::Dimension(format!(
            "raw 4:2:0 requires positive even dimensions, got {}x{}",
            width, height
        )));
    }
    let frame_payload = width * height * 3 / 2;
    if bytes.is_empty() || bytes.len() % frame_payload != 0 {
        return Err(Error::Parse(format!(
            "stream length {} is not a multiple of the {}-byte frame size",
            bytes.len(),
            frame_payload
        )));
    }
    let (cw, ch) = Subsampling::S420.chroma_dims(width, height);
    let mut frames = Vec::new();
    for chunk in bytes.chunks_exact(frame_payload) {
        let y = decode_plane(&chunk[..width * height], width, height, Range::Limited, true);
        let cb = decode_plane(
            &chunk[width * height..width * height + cw * ch],
            cw,
            ch,
            Range::Limited,
            false,
        );
        let cr = decode_plane(&chunk[width * height + cw * ch..], cw, ch, Range::Limited, false);
        frames.push(Frame::new(y, cb, cr, Subsampling::S420, Range::Limited)?);
    }
    VideoClip::new(id, frames, fps_num, fps_den)
}

/// Serialize a clip back to Y4M. Planes round-trip bit-exactly through
/// `parse_y4m` because decoded samples are integral.
pub fn write_y4m(clip: &VideoClip) -> Vec<u8> {
    let first = &clip.frames()[0];
    let ctag = match (first.subsampling, first.range) {
        (Subsampling::S420, Range::Limited) => "420",
        (Subsampling::S420, Range::Full) => "420jpeg",
        (Subsampling::S422, _) => "422",
        (Subsampling::S444, _) => "444",
    };
    let (num, den) = clip.fps_rational();
    let mut out = format!(
        "YUV4MPEG2 W{} H{} F{}:{} Ip A1:1 C{}\n",
        clip.width(),
        clip.height(),
        num,
        den,
        ctag
    )
    .into_bytes();
    for frame in clip.frames() {
        out.extend_from_slice(b"FRAME\n");
        for plane in [&frame.y, &frame.cb, &frame.cr] {
            out.extend(
                plane
                    .samples()
                    .iter()
                    .map(|&v| v.round().clamp(0.0, 255.0) as u8),
            );
        }
    }
    out
}

fn parse_dim(value: &str, tag: &str) -> Result<usize> {
    let v: usize = value
        .parse()
        .map_err(|_| Error::Parse(format!("bad {} tag value {:?}", tag, value)))?;
    if v == 0 {
        return Err(Error::Parse(format!("{} tag must be positive", tag)));
    }
    Ok(v)
}

fn parse_ratio(value: &str) -> Result<(u32, u32)> {
    let (num, den) = value
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("bad F tag value {:?}", value)))?;
    let num = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad F numerator {:?}", num)))?;
    let den = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad F denominator {:?}", den)))?;
    Ok((num, den))
}

fn expect_frame_marker(bytes: &[u8], pos: usize, index: usize) -> Result<usize> {
    let rest = &bytes[pos..];
    if rest.len() < 5 || &rest[..5] != b"FRAME" {
        return Err(Error::Parse(format!("missing FRAME marker at frame {}", index)));
    }
    // optional parameters up to the newline
    match rest.iter().position(|&b| b == b'\n') {
        Some(nl) => Ok(pos + nl + 1),
        None => Err(Error::Parse(format!(
            "unterminated FRAME header at frame {}",
            index
        ))),
    }
}

fn decode_plane(bytes: &[u8], width: usize, height: usize, range: Range, is_luma: bool) -> PixelPlane {
    let samples = match range {
        Range::Full => bytes.iter().map(|&b| f64::from(b)).collect(),
        Range::Limited => {
            let (lo, hi) = if is_luma { (16.0, 235.0) } else { (16.0, 240.0) };
            bytes.iter().map(|&b| f64::from(b).clamp(lo, hi)).collect()
        }
    };
    PixelPlane {
        width,
        height,
        samples,
    }
}
