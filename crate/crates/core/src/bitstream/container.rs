//! `CSW1` container: a 44-byte header then, per GOF, `2 + 6·levels`
//! length-prefixed segments. All integers are little-endian.

use crate::error::{Error, Result};
use crate::lifting::CoeffMode;

pub const MAGIC: [u8; 4] = *b"CSW1";
pub const HEADER_LEN: usize = 44;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub width: u32,
    pub height: u32,
    pub frame_count: u32,
    pub gof_count: u32,
    pub levels: u8,
    pub coeff_mode: CoeffMode,
    /// The last GOF repeats its only frame.
    pub duplicated: bool,
    /// Q16.16; `u32::MAX` means no detail coefficient survived the threshold
    /// by construction (infinite threshold).
    pub threshold_q16: u32,
    pub phi_seed: u64,
    pub m: u32,
    pub n: u32,
}

impl Header {
    pub fn threshold(&self) -> f64 {
        if self.threshold_q16 == u32::MAX {
            f64::INFINITY
        } else {
            f64::from(self.threshold_q16) / 65536.0
        }
    }

    pub fn threshold_to_q16(t: f64) -> u32 {
        let q = (t * 65536.0).round();
        if q >= f64::from(u32::MAX) {
            u32::MAX
        } else {
            q.max(0.0) as u32
        }
    }

    pub fn segments_per_gof(&self) -> usize {
        2 + 6 * usize::from(self.levels)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub header: Header,
    /// `gofs[g][s]` is segment `s` of GOF `g`.
    pub gofs: Vec<Vec<Vec<u8>>>,
}

impl Container {
    /// Absolute byte offset of a segment's payload.
    pub fn segment_offset(&self, gof: usize, seg: usize) -> usize {
        let mut off = HEADER_LEN;
        for (g, segs) in self.gofs.iter().enumerate() {
            for (s, d) in segs.iter().enumerate() {
                if (g, s) == (gof, seg) {
                    return off + 4;
                }
                off += 4 + d.len();
            }
        }
        off
    }

    pub fn byte_len(&self) -> usize {
        HEADER_LEN + self.gofs.iter().flatten().map(|s| 4 + s.len()).sum::<usize>()
    }
}

pub fn pack(c: &Container) -> Result<Vec<u8>> {
    let h = &c.header;
    if c.gofs.len() != h.gof_count as usize {
        return Err(Error::validation(
            "bitstream",
            format!("header declares {} GOFs, container holds {}", h.gof_count, c.gofs.len()),
        ));
    }
    let mut out = Vec::with_capacity(c.byte_len());
    out.extend_from_slice(&MAGIC);
    for v in [h.width, h.height, h.frame_count, h.gof_count] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&[h.levels, h.coeff_mode.code(), u8::from(h.duplicated), 0]);
    out.extend_from_slice(&h.threshold_q16.to_le_bytes());
    out.extend_from_slice(&h.phi_seed.to_le_bytes());
    out.extend_from_slice(&h.m.to_le_bytes());
    out.extend_from_slice(&h.n.to_le_bytes());
    for (g, segs) in c.gofs.iter().enumerate() {
        if segs.len() != h.segments_per_gof() {
            return Err(Error::validation(
                "bitstream",
                format!("GOF {g} has {} segments, expected {}", segs.len(), h.segments_per_gof()),
            ));
        }
        for s in segs {
            let len = u32::try_from(s.len()).map_err(|_| Error::validation("bitstream", "segment exceeds 4 GiB"))?;
            out.extend_from_slice(&len.to_le_bytes());
            out.extend_from_slice(s);
        }
    }
    Ok(out)
}

fn u32_at(b: &[u8], off: usize) -> Result<u32> {
    b.get(off..off + 4)
        .map(|s| u32::from_le_bytes(s.try_into().unwrap()))
        .ok_or_else(|| Error::bitstream(off, "unexpected end of data"))
}

pub fn unpack(bytes: &[u8]) -> Result<Container> {
    if bytes.len() < 4 || bytes[..4] != MAGIC {
        return Err(Error::bitstream(0, "bad magic, not a CSW1 stream"));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::bitstream(bytes.len(), "header truncated"));
    }
    let levels = bytes[20];
    if !(1..=3).contains(&levels) {
        return Err(Error::bitstream(20, format!("levels {levels} outside 1..=3")));
    }
    let coeff_mode = CoeffMode::from_code(bytes[21])
        .ok_or_else(|| Error::bitstream(21, format!("unknown coefficient mode {}", bytes[21])))?;
    if bytes[22] > 1 {
        return Err(Error::bitstream(22, format!("duplicate flag {} is not 0 or 1", bytes[22])));
    }
    let header = Header {
        width: u32_at(bytes, 4)?,
        height: u32_at(bytes, 8)?,
        frame_count: u32_at(bytes, 12)?,
        gof_count: u32_at(bytes, 16)?,
        levels,
        coeff_mode,
        duplicated: bytes[22] == 1,
        threshold_q16: u32_at(bytes, 24)?,
        phi_seed: u64::from_le_bytes(bytes[28..36].try_into().unwrap()),
        m: u32_at(bytes, 36)?,
        n: u32_at(bytes, 40)?,
    };
    let expected_frames = u64::from(header.gof_count) * 2 - u64::from(header.duplicated);
    if header.duplicated && header.gof_count == 0 || u64::from(header.frame_count) != expected_frames {
        return Err(Error::bitstream(
            12,
            format!(
                "frame count {} inconsistent with {} GOFs (duplicate flag {})",
                header.frame_count, header.gof_count, header.duplicated
            ),
        ));
    }
    let mut off = HEADER_LEN;
    let mut gofs = Vec::new();
    for _ in 0..header.gof_count {
        let mut segs = Vec::with_capacity(header.segments_per_gof());
        for _ in 0..header.segments_per_gof() {
            let len = u32_at(bytes, off)? as usize;
            let body = bytes.get(off + 4..off + 4 + len).ok_or_else(|| {
                Error::bitstream(off, format!("segment length {len} runs past end of stream ({} bytes)", bytes.len()))
            })?;
            segs.push(body.to_vec());
            off += 4 + len;
        }
        gofs.push(segs);
    }
    if off != bytes.len() {
        return Err(Error::bitstream(off, format!("{} trailing bytes after last segment", bytes.len() - off)));
    }
    Ok(Container { header, gofs })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample_header(gofs: u32) -> Header {
        Header {
            width: 64,
            height: 64,
            frame_count: gofs * 2,
            gof_count: gofs,
            levels: 1,
            coeff_mode: CoeffMode::FixedAdopted,
            duplicated: false,
            threshold_q16: Header::threshold_to_q16(8.5),
            phi_seed: 0x0123_4567_89AB_CDEF,
            m: 16,
            n: 64,
        }
    }

    #[test]
    fn header_only_stream() {
        let c = Container {
            header: sample_header(0),
            gofs: vec![],
        };
        let b = pack(&c).unwrap();
        assert_eq!(b.len(), HEADER_LEN);
        assert_eq!(&b[..4], b"CSW1");
        assert_eq!(b[24..28], [0x00, 0x80, 0x08, 0x00]);
        assert_eq!(unpack(&b).unwrap(), c);
    }

    #[test]
    fn errors_carry_offsets() {
        let c = Container {
            header: sample_header(1),
            gofs: vec![vec![vec![1, 2, 3]; 8]],
        };
        let b = pack(&c).unwrap();
        assert_eq!(unpack(&b).unwrap(), c);
        let off = |r: Result<Container>| match r {
            Err(Error::Bitstream { offset, .. }) => offset,
            other => panic!("{other:?}"),
        };
        assert_eq!(off(unpack(b"CSW2")), 0);
        assert_eq!(off(unpack(&b[..b.len() - 1])), b.len() - 7);
        let mut extra = b.clone();
        extra.push(0);
        assert_eq!(off(unpack(&extra)), b.len());
        assert_eq!(c.segment_offset(0, 1), HEADER_LEN + 4 + 3 + 4);
    }

    #[test]
    fn infinite_threshold() {
        assert_eq!(Header::threshold_to_q16(f64::INFINITY), u32::MAX);
        let h = Header {
            threshold_q16: u32::MAX,
            ..sample_header(0)
        };
        assert!(h.threshold().is_infinite());
    }
}
