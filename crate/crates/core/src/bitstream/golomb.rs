//! Golomb-Rice coding with a zero-run escape.
//!
//! Values are zigzag folded, then coded as a unary quotient (`q` ones and a
//! zero) followed by `k` remainder bits. After four consecutive zero
//! codewords an order-0 exp-Golomb count of further zeros always follows, so
//! a run of `r >= 4` zeros costs four zero codewords plus `EG0(r - 4)`.

use super::bits::{BitReader, BitWriter};
use crate::error::{ensure, Error, Result};

pub const MAX_K: u8 = 15;
/// Zero codewords that trigger the run count.
pub const RUN_ESCAPE: usize = 4;

pub fn zigzag(v: i32) -> u32 {
    ((v << 1) ^ (v >> 31)) as u32
}

pub fn unzigzag(u: u32) -> i32 {
    ((u >> 1) as i32) ^ -((u & 1) as i32)
}

fn rice_len(u: u32, k: u8) -> u64 {
    u64::from(u >> k) + 1 + u64::from(k)
}

fn eg_len(v: u64) -> u64 {
    2 * u64::from(64 - (v + 1).leading_zeros()) - 1
}

enum Token {
    Literal(u32),
    Run(u64),
}

/// Split the stream into literal values and escaped runs.
fn tokens(values: &[i32]) -> Vec<Token> {
    let mut out = Vec::with_capacity(values.len());
    let mut i = 0;
    let mut zeros = 0;
    while i < values.len() {
        let v = values[i];
        out.push(Token::Literal(zigzag(v)));
        i += 1;
        if v != 0 {
            zeros = 0;
            continue;
        }
        zeros += 1;
        if zeros == RUN_ESCAPE {
            let extra = values[i..].iter().take_while(|&&x| x == 0).count();
            out.push(Token::Run(extra as u64));
            i += extra;
            zeros = 0;
        }
    }
    out
}

/// Coded length in bits.
pub fn gr_len(values: &[i32], k: u8) -> u64 {
    tokens(values)
        .iter()
        .map(|t| match *t {
            Token::Literal(u) => rice_len(u, k),
            Token::Run(r) => eg_len(r),
        })
        .sum()
}

/// Parameter in `0..=15` giving the shortest code; ties go to the smaller.
pub fn best_k(values: &[i32]) -> u8 {
    (0..=MAX_K).min_by_key(|&k| (gr_len(values, k), k)).unwrap()
}

pub fn write_gr(w: &mut BitWriter, values: &[i32], k: u8) -> Result<()> {
    ensure!(k <= MAX_K, "bitstream", "Rice parameter {k} exceeds {MAX_K}");
    for t in tokens(values) {
        match t {
            Token::Literal(u) => {
                w.unary(u64::from(u >> k));
                w.bits(u64::from(u), u32::from(k));
            }
            Token::Run(r) => w.exp_golomb(r),
        }
    }
    Ok(())
}

pub fn read_gr(r: &mut BitReader, k: u8, count: usize) -> Result<Vec<i32>> {
    ensure!(k <= MAX_K, "bitstream", "Rice parameter {k} exceeds {MAX_K}");
    let mut out = Vec::with_capacity(count);
    let mut zeros = 0;
    while out.len() < count {
        let at = r.byte_offset();
        let q = r.unary()?;
        let u = (q << k) | r.bits(u32::from(k))?;
        let u = u32::try_from(u).map_err(|_| Error::bitstream(at, "Golomb-Rice value out of range"))?;
        let v = unzigzag(u);
        out.push(v);
        if v != 0 {
            zeros = 0;
            continue;
        }
        zeros += 1;
        if zeros == RUN_ESCAPE {
            let at = r.byte_offset();
            let extra = r.exp_golomb()?;
            if extra > (count - out.len()) as u64 {
                return Err(Error::bitstream(at, format!("zero run of {extra} overruns the {count} coded values")));
            }
            out.resize(out.len() + extra as usize, 0);
            zeros = 0;
        }
    }
    Ok(out)
}

/// Code `values` alone; returns the bytes and the exact bit length.
pub fn gr_encode(values: &[i32], k: u8) -> Result<(Vec<u8>, usize)> {
    let mut w = BitWriter::new();
    write_gr(&mut w, values, k)?;
    let n = w.bit_len();
    Ok((w.finish(), n))
}

pub fn gr_decode(bytes: &[u8], k: u8, count: usize) -> Result<Vec<i32>> {
    read_gr(&mut BitReader::new(bytes, 0), k, count)
}

/// `[k:4][codes]` with the best `k`.
pub fn write_segment(w: &mut BitWriter, values: &[i32]) -> Result<()> {
    let k = best_k(values);
    w.bits(u64::from(k), 4);
    write_gr(w, values, k)
}

pub fn read_segment(r: &mut BitReader, count: usize) -> Result<Vec<i32>> {
    let k = r.bits(4)? as u8;
    read_gr(r, k, count)
}
