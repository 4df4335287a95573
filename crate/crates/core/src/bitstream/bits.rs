use crate::error::{Error, Result};

/// MSB-first bit writer.
#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    len: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bit(&mut self, b: bool) {
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        if b {
            *self.bytes.last_mut().unwrap() |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Low `n` bits of `v`, most significant first.
    pub fn bits(&mut self, v: u64, n: u32) {
        for i in (0..n).rev() {
            self.bit((v >> i) & 1 == 1);
        }
    }

    pub fn unary(&mut self, q: u64) {
        for _ in 0..q {
            self.bit(true);
        }
        self.bit(false);
    }

    /// Order-0 exponential Golomb.
    pub fn exp_golomb(&mut self, v: u64) {
        let x = v + 1;
        let n = 64 - x.leading_zeros();
        self.bits(0, n - 1);
        self.bits(x, n);
    }

    pub fn bit_len(&self) -> usize {
        self.len
    }

    /// Bytes with the last one zero-padded.
    pub fn finish(self) -> Vec<u8> {
        self.bytes
    }
}

/// MSB-first bit reader. Errors report the absolute byte offset, counted
/// from `base`.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    base: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8], base: usize) -> Self {
        BitReader { bytes, pos: 0, base }
    }

    pub fn byte_offset(&self) -> usize {
        self.base + self.pos / 8
    }

    pub fn bits_left(&self) -> usize {
        self.bytes.len() * 8 - self.pos
    }

    fn truncated(&self) -> Error {
        Error::bitstream(self.byte_offset(), "unexpected end of data")
    }

    pub fn bit(&mut self) -> Result<bool> {
        let byte = *self.bytes.get(self.pos / 8).ok_or_else(|| self.truncated())?;
        let b = byte & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Ok(b)
    }

    pub fn bits(&mut self, n: u32) -> Result<u64> {
        if self.bits_left() < n as usize {
            return Err(self.truncated());
        }
        let mut v = 0;
        for _ in 0..n {
            v = (v << 1) | u64::from(self.bit()?);
        }
        Ok(v)
    }

    pub fn unary(&mut self) -> Result<u64> {
        let mut q = 0;
        while self.bit()? {
            q += 1;
        }
        Ok(q)
    }

    pub fn exp_golomb(&mut self) -> Result<u64> {
        let mut zeros = 0;
        while !self.bit()? {
            zeros += 1;
            if zeros > 63 {
                return Err(Error::bitstream(self.byte_offset(), "exp-Golomb prefix too long"));
            }
        }
        Ok(((1u64 << zeros) | self.bits(zeros)?) - 1)
    }
}
