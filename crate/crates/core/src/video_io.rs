//! Grayscale frame I/O and frame-pair grouping.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{ensure, Error, Result};

const MODULE: &str = "video_io";

/// One luma frame, samples in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl Frame {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        ensure!(
            samples.len() == width * height,
            MODULE,
            "{}x{} frame needs {} samples, got {}",
            width,
            height,
            width * height,
            samples.len()
        );
        Ok(Frame { width, height, samples })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Frame::new(width, height, vec![value; width * height])
    }

    /// Round to nearest and clamp to [0, 255].
    pub fn from_f64(width: usize, height: usize, values: &[f64]) -> Result<Self> {
        Frame::new(width, height, values.iter().map(|&v| clamp_sample(v)).collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.samples[row * self.width + col]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.samples.iter().map(|&v| f64::from(v)).collect()
    }
}

pub fn clamp_sample(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    ensure!(
        width >= 2 && height >= 2 && width % 2 == 0 && height % 2 == 0,
        MODULE,
        "frame dimensions must be even and at least 2, got {width}x{height}"
    );
    Ok(())
}

/// Two temporally adjacent frames of equal size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramePair {
    pub first: Frame,
    pub second: Frame,
}

impl FramePair {
    pub fn new(first: Frame, second: Frame) -> Result<Self> {
        ensure!(
            first.width == second.width && first.height == second.height,
            MODULE,
            "frame pair size mismatch: {}x{} vs {}x{}",
            first.width,
            first.height,
            second.width,
            second.height
        );
        Ok(FramePair { first, second })
    }

    pub fn width(&self) -> usize {
        self.first.width
    }

    pub fn height(&self) -> usize {
        self.first.height
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedPairs {
    pub pairs: Vec<FramePair>,
    /// The last pair repeats a trailing odd frame; the decoder drops the copy.
    pub duplicated: bool,
}

/// Pair frames `(2i, 2i+1)`, duplicating a trailing odd frame.
pub fn group_pairs(frames: &[Frame]) -> Result<GroupedPairs> {
    ensure!(!frames.is_empty(), MODULE, "cannot group an empty frame sequence");
    let mut pairs = Vec::with_capacity(frames.len().div_ceil(2));
    for chunk in frames.chunks(2) {
        let second = chunk.get(1).unwrap_or(&chunk[0]);
        pairs.push(FramePair::new(chunk[0].clone(), second.clone())?);
    }
    Ok(GroupedPairs {
        pairs,
        duplicated: frames.len() % 2 == 1,
    })
}

/// Inverse of [`group_pairs`].
pub fn ungroup_pairs(pairs: Vec<FramePair>, duplicated: bool) -> Vec<Frame> {
    let mut out = Vec::with_capacity(pairs.len() * 2);
    for p in pairs {
        out.push(p.first);
        out.push(p.second);
    }
    if duplicated {
        out.pop();
    }
    out
}

/// A container format for grayscale frame sequences.
pub trait FrameFormat: Send + Sync {
    fn name(&self) -> &'static str;
    fn decode(&self, bytes: &[u8], width: usize, height: usize, count: usize) -> Result<Vec<Frame>>;
    fn encode(&self, frames: &[Frame]) -> Vec<u8>;
}

/// Headerless 8-bit planar frames back to back.
#[derive(Debug, Default)]
pub struct RawFormat;

impl FrameFormat for RawFormat {
    fn name(&self) -> &'static str {
        "raw"
    }

    fn decode(&self, bytes: &[u8], width: usize, height: usize, count: usize) -> Result<Vec<Frame>> {
        let frame_len = width * height;
        let expected = frame_len * count;
        if bytes.len() < expected {
            return Err(Error::Io {
                module: MODULE,
                msg: format!("truncated raw input: expected {expected}, got {}", bytes.len()),
                source: None,
            });
        }
        if bytes.len() > expected {
            log::warn!("raw input has {} trailing bytes; ignored", bytes.len() - expected);
        }
        bytes[..expected]
            .chunks_exact(frame_len.max(1))
            .map(|c| Frame::new(width, height, c.to_vec()))
            .collect()
    }

    fn encode(&self, frames: &[Frame]) -> Vec<u8> {
        frames.iter().flat_map(|f| f.samples.iter().copied()).collect()
    }
}

/// Concatenated binary PGM (P5) images, maxval ≤ 255.
#[derive(Debug, Default)]
pub struct PgmFormat;

struct PgmCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl PgmCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        ensure!(self.pos > start, MODULE, "malformed PGM header at byte {start}");
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::validation(MODULE, format!("PGM header number too large at byte {start}")))
    }
}

impl FrameFormat for PgmFormat {
    fn name(&self) -> &'static str {
        "pgm"
    }

    fn decode(&self, bytes: &[u8], width: usize, height: usize, count: usize) -> Result<Vec<Frame>> {
        let mut cur = PgmCursor { bytes, pos: 0 };
        let mut frames = Vec::with_capacity(count);
        for i in 0..count {
            cur.skip_space_and_comments();
            let magic = bytes.get(cur.pos..cur.pos + 2);
            match magic {
                Some(b"P5") => {}
                Some(b"P6") | Some(b"P3") => {
                    return Err(Error::validation(MODULE, "colour PPM input is not supported (luma only)"))
                }
                None => {
                    return Err(Error::Io {
                        module: MODULE,
                        msg: format!("PGM stream ended after {i} of {count} frames"),
                        source: None,
                    })
                }
                _ => return Err(Error::validation(MODULE, format!("frame {i}: not a binary PGM (P5)"))),
            }
            cur.pos += 2;
            let (w, h, maxval) = (cur.number()?, cur.number()?, cur.number()?);
            ensure!(
                w == width && h == height,
                MODULE,
                "frame {i}: PGM is {w}x{h}, expected {width}x{height}"
            );
            ensure!((1..=255).contains(&maxval), MODULE, "frame {i}: unsupported maxval {maxval}");
            // exactly one whitespace byte separates the header from the raster
            cur.pos += 1;
            let end = cur.pos + w * h;
            if end > bytes.len() {
                return Err(Error::Io {
                    module: MODULE,
                    msg: format!(
                        "frame {i}: truncated PGM raster: expected {}, got {}",
                        w * h,
                        bytes.len().saturating_sub(cur.pos)
                    ),
                    source: None,
                });
            }
            frames.push(Frame::new(w, h, bytes[cur.pos..end].to_vec())?);
            cur.pos = end;
        }
        Ok(frames)
    }

    fn encode(&self, frames: &[Frame]) -> Vec<u8> {
        let mut out = Vec::new();
        for f in frames {
            out.extend_from_slice(format!("P5\n{} {}\n255\n", f.width, f.height).as_bytes());
            out.extend_from_slice(&f.samples);
        }
        out
    }
}

/// Frame formats selectable by name.
pub struct FormatRegistry {
    formats: BTreeMap<&'static str, Box<dyn FrameFormat>>,
}

impl Default for FormatRegistry {
    fn default() -> Self {
        let mut r = FormatRegistry {
            formats: BTreeMap::new(),
        };
        r.register(Box::new(RawFormat));
        r.register(Box::new(PgmFormat));
        r
    }
}

impl FormatRegistry {
    pub fn register(&mut self, format: Box<dyn FrameFormat>) {
        self.formats.insert(format.name(), format);
    }

    pub fn get(&self, name: &str) -> Result<&dyn FrameFormat> {
        self.formats.get(name).map(|f| f.as_ref()).ok_or_else(|| {
            Error::validation(
                MODULE,
                format!("unknown frame format {name:?} (known: {:?})", self.names()),
            )
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.formats.keys().copied().collect()
    }
}

pub fn load_frames(
    path: &Path,
    format: &dyn FrameFormat,
    width: usize,
    height: usize,
    count: usize,
) -> Result<Vec<Frame>> {
    check_dims(width, height)?;
    ensure!(count > 0, MODULE, "frame count must be positive");
    let bytes = fs::read(path).map_err(|e| Error::io(MODULE, format!("cannot read {}", path.display()), e))?;
    format.decode(&bytes, width, height, count)
}

/// Write frames, returning the number of bytes written.
pub fn write_frames(frames: &[Frame], path: &Path, format: &dyn FrameFormat) -> Result<usize> {
    ensure!(!frames.is_empty(), MODULE, "no frames to write");
    let bytes = format.encode(frames);
    fs::write(path, &bytes).map_err(|e| Error::io(MODULE, format!("cannot write {}", path.display()), e))?;
    Ok(bytes.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(v: u8) -> Frame {
        Frame::filled(4, 4, v).unwrap()
    }

    #[test]
    fn pairs_in_order() {
        let g = group_pairs(&[frame(0), frame(1), frame(2), frame(3)]).unwrap();
        assert!(!g.duplicated);
        assert_eq!(g.pairs.len(), 2);
        assert_eq!(g.pairs[1].first, frame(2));
        assert_eq!(g.pairs[1].second, frame(3));
    }

    #[test]
    fn odd_frame_duplicated() {
        let g = group_pairs(&[frame(7)]).unwrap();
        assert!(g.duplicated);
        assert_eq!(g.pairs[0].first, g.pairs[0].second);
        assert_eq!(ungroup_pairs(g.pairs, true), vec![frame(7)]);
    }

    #[test]
    fn empty_rejected() {
        assert!(group_pairs(&[]).is_err());
    }

    #[test]
    fn odd_dimensions_rejected() {
        assert!(Frame::filled(3, 4, 0).is_err());
    }

    #[test]
    fn clamp_rounds_and_saturates() {
        let f = Frame::from_f64(2, 2, &[260.0, -4.0, 1.5, 2.49]).unwrap();
        assert_eq!(f.samples(), &[255, 0, 2, 2]);
    }

    #[test]
    fn truncated_raw_reports_sizes() {
        let err = RawFormat.decode(&[0; 100], 8, 8, 2).unwrap_err();
        assert!(err.to_string().contains("expected 128, got 100"), "{err}");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn pgm_with_comment() {
        let mut bytes = b"P5\n# made by hand\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4]);
        let f = PgmFormat.decode(&bytes, 2, 2, 1).unwrap();
        assert_eq!(f[0].samples(), &[1, 2, 3, 4]);
    }

    #[test]
    fn colour_rejected() {
        assert!(PgmFormat.decode(b"P6\n2 2\n255\n", 2, 2, 1).is_err());
    }

    #[test]
    fn registry_lookup() {
        let r = FormatRegistry::default();
        assert_eq!(r.get("pgm").unwrap().name(), "pgm");
        assert!(r.get("y4m").is_err());
    }
}
