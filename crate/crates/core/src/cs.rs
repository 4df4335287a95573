//! Bernoulli measurement matrix and streaming measurement.
//!
//! Φ is stored one column per word: column `k` is an `M`-bit word (held as
//! `ceil(M/64)` limbs) where bit `i` is 0 for `+1` and 1 for `-1`. The
//! measurement unit streams one input sample per step and adds or subtracts
//! it into every accumulator according to that column's bits.
//!
//! Bits come from SplitMix64 used as a counter-based generator: limb `c` of
//! column `k` is the `(k * limbs + c + 1)`-th output of SplitMix64 seeded
//! with `seed`, i.e. `mix(seed + (k*limbs + c + 1) * 0x9E3779B97F4A7C15)`.
//! Any bit can be regenerated independently, so the decoder needs only
//! `(seed, M, N)`.

use crate::error::{ensure, Result};

const MODULE: &str = "cs_core";
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `counter`-th output (from 0) of SplitMix64 seeded with `seed`.
pub fn splitmix64_at(seed: u64, counter: u64) -> u64 {
    splitmix64_mix(seed.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiMatrix {
    m: usize,
    n: usize,
    seed: u64,
    limbs: usize,
    bits: Vec<u64>,
}

/// Generate an `m`×`n` Bernoulli ±1 matrix.
pub fn gen_phi(seed: u64, m: usize, n: usize) -> Result<PhiMatrix> {
    ensure!(m >= 1 && n >= 1, MODULE, "matrix dimensions must be positive, got {m}x{n}");
    ensure!(m <= n, MODULE, "M={m} exceeds N={n}");
    let limbs = m.div_ceil(64);
    let tail_mask = if m % 64 == 0 { u64::MAX } else { (1u64 << (m % 64)) - 1 };
    let mut bits = Vec::with_capacity(limbs * n);
    for k in 0..n {
        for c in 0..limbs {
            let mut w = splitmix64_at(seed, (k * limbs + c) as u64);
            if c == limbs - 1 {
                w &= tail_mask;
            }
            bits.push(w);
        }
    }
    Ok(PhiMatrix {
        m,
        n,
        seed,
        limbs,
        bits,
    })
}

impl PhiMatrix {
    /// Build a matrix from an explicit sign rule; `negative(i, k)` marks
    /// Φ[i][k] = -1.
    pub fn from_fn(m: usize, n: usize, negative: impl Fn(usize, usize) -> bool) -> Result<Self> {
        ensure!(m >= 1 && m <= n, MODULE, "invalid matrix shape {m}x{n}");
        let limbs = m.div_ceil(64);
        let mut bits = vec![0u64; limbs * n];
        for k in 0..n {
            for i in 0..m {
                if negative(i, k) {
                    bits[k * limbs + i / 64] |= 1 << (i % 64);
                }
            }
        }
        Ok(PhiMatrix {
            m,
            n,
            seed: 0,
            limbs,
            bits,
        })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Column `k` as packed limbs, bit `i` of the word is row `i`.
    pub fn column(&self, k: usize) -> &[u64] {
        &self.bits[k * self.limbs..(k + 1) * self.limbs]
    }

    /// True where Φ[i][k] = -1.
    #[inline]
    pub fn bit(&self, i: usize, k: usize) -> bool {
        (self.column(k)[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn entry(&self, i: usize, k: usize) -> i32 {
        if self.bit(i, k) {
            -1
        } else {
            1
        }
    }

    pub fn ones_fraction(&self) -> f64 {
        let ones: u32 = self.bits.iter().map(|w| w.count_ones()).sum();
        f64::from(ones) / (self.m * self.n) as f64
    }

    /// Row-major dense copy of Φ scaled by `scale`.
    pub fn dense(&self, scale: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.m * self.n];
        for i in 0..self.m {
            for k in 0..self.n {
                out[i * self.n + k] = scale * f64::from(self.entry(i, k));
            }
        }
        out
    }
}

/// Result of [`choose_m`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MChoice {
    pub m: usize,
    /// `K log2(N/K)`, when a sparsity estimate was given.
    pub bound: Option<f64>,
    pub warned: bool,
}

/// `M = N/4`, with a warning when it falls below `K log2(N/K)`.
pub fn choose_m(n: usize, k: Option<usize>) -> Result<MChoice> {
    ensure!(n >= 8, MODULE, "vector length {n} is below 8");
    let m = n / 4;
    let bound = k.filter(|&k| k > 0).map(|k| k as f64 * (n as f64 / k as f64).log2());
    let warned = bound.is_some_and(|b| (m as f64) < b);
    if warned {
        log::warn!(
            "M={m} is below K·log2(N/K)={:.1} for N={n}, K={}; recovery may fail",
            bound.unwrap(),
            k.unwrap()
        );
    }
    Ok(MChoice { m, bound, warned })
}

/// ℓ0 norm.
pub fn estimate_sparsity(x: &[f64]) -> usize {
    x.iter().filter(|&&v| v != 0.0).count()
}

/// Largest magnitude of a `data_in` sample: 15-bit signed.
pub const DATA_IN_MAX: i32 = (1 << 14) - 1;

/// Quantize a transform coefficient to the 15-bit measurement input.
pub fn data_in(v: f64) -> i16 {
    (v.round() as i64).clamp(-i64::from(DATA_IN_MAX), i64::from(DATA_IN_MAX)) as i16
}

/// Completed measurement of one column block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementVector {
    pub values: Vec<i16>,
    /// Accumulators that hit the 16-bit range at some step.
    pub saturated: Vec<bool>,
}

impl MeasurementVector {
    pub fn saturation_count(&self) -> usize {
        self.saturated.iter().filter(|&&s| s).count()
    }
}

/// Streaming accumulator bank with a working and an output buffer.
#[derive(Debug, Clone)]
pub struct MeasurementUnit<'a> {
    phi: &'a PhiMatrix,
    working: Vec<i16>,
    saturated: Vec<bool>,
    output: Vec<i16>,
    output_saturated: Vec<bool>,
    next: usize,
}

impl<'a> MeasurementUnit<'a> {
    pub fn new(phi: &'a PhiMatrix) -> Self {
        MeasurementUnit {
            phi,
            working: vec![0; phi.m],
            saturated: vec![false; phi.m],
            output: vec![0; phi.m],
            output_saturated: vec![false; phi.m],
            next: 0,
        }
    }

    /// `y_i += Φ_ik · x_k` for the next `k`, where `-x` is the two's
    /// complement of `data_in`.
    pub fn push(&mut self, x: i16) {
        let col = self.phi.column(self.next);
        for (i, (y, sat)) in self.working.iter_mut().zip(&mut self.saturated).enumerate() {
            let neg = (col[i / 64] >> (i % 64)) & 1 == 1;
            let (v, o) = if neg { y.overflowing_sub(x) } else { y.overflowing_add(x) };
            if o {
                *sat = true;
                *y = if neg == (x > 0) { i16::MIN } else { i16::MAX };
            } else {
                *y = v;
            }
        }
        self.next += 1;
    }

    /// Move the completed vector to the output buffer and clear the working
    /// buffer.
    pub fn finish(&mut self) -> Result<MeasurementVector> {
        ensure!(
            self.next == self.phi.n,
            MODULE,
            "measurement finished after {} of {} samples",
            self.next,
            self.phi.n
        );
        std::mem::swap(&mut self.output, &mut self.working);
        std::mem::swap(&mut self.output_saturated, &mut self.saturated);
        self.working.fill(0);
        self.saturated.fill(false);
        self.next = 0;
        Ok(MeasurementVector {
            values: self.output.clone(),
            saturated: self.output_saturated.clone(),
        })
    }
}

/// Fixed-point streaming measurement of 15-bit inputs.
pub fn measure(x: &[i16], phi: &PhiMatrix) -> Result<MeasurementVector> {
    ensure!(
        x.len() == phi.n,
        MODULE,
        "vector length {} does not match Φ with N={}",
        x.len(),
        phi.n
    );
    let mut unit = MeasurementUnit::new(phi);
    for &v in x {
        unit.push(v);
    }
    unit.finish()
}

/// Floating-point measurement, streamed in the same column order.
pub fn measure_float(x: &[f64], phi: &PhiMatrix) -> Result<Vec<f64>> {
    ensure!(
        x.len() == phi.n,
        MODULE,
        "vector length {} does not match Φ with N={}",
        x.len(),
        phi.n
    );
    let mut y = vec![0.0; phi.m];
    for (k, &v) in x.iter().enumerate() {
        for (i, acc) in y.iter_mut().enumerate() {
            if phi.bit(i, k) {
                *acc -= v;
            } else {
                *acc += v;
            }
        }
    }
    Ok(y)
}

/// Round float measurements to the transmitted 16-bit range.
pub fn quantize_measurements(y: &[f64]) -> MeasurementVector {
    let mut saturated = vec![false; y.len()];
    let values = y
        .iter()
        .zip(&mut saturated)
        .map(|(&v, s)| {
            let r = v.round();
            if r > f64::from(i16::MAX) || r < f64::from(i16::MIN) {
                *s = true;
            }
            r.clamp(f64::from(i16::MIN), f64::from(i16::MAX)) as i16
        })
        .collect();
    MeasurementVector { values, saturated }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // first outputs of SplitMix64 seeded with 1234567
        assert_eq!(splitmix64_at(1234567, 0), 6457827717110365317);
        assert_eq!(splitmix64_at(1234567, 1), 3203168211198807973);
    }

    #[test]
    fn determinism_and_balance() {
        let a = gen_phi(42, 128, 512).unwrap();
        assert_eq!(a, gen_phi(42, 128, 512).unwrap());
        assert_ne!(a, gen_phi(43, 128, 512).unwrap());
        let f = a.ones_fraction();
        assert!((0.45..=0.55).contains(&f), "{f}");
        assert!(gen_phi(1, 600, 512).is_err());
    }

    #[test]
    fn choose_m_examples() {
        assert_eq!(choose_m(512, None).unwrap().m, 128);
        let c = choose_m(512, Some(64)).unwrap();
        assert_eq!(c.m, 128);
        assert!(c.warned);
        assert!((c.bound.unwrap() - 192.0).abs() < 1e-9);
        assert_eq!(choose_m(8, None).unwrap().m, 2);
        assert!(!choose_m(512, Some(8)).unwrap().warned);
    }

    #[test]
    fn sparsity() {
        assert_eq!(estimate_sparsity(&[0.0; 4]), 0);
        assert_eq!(estimate_sparsity(&[0.0, 3.0, 0.0, -2.0]), 2);
    }

    #[test]
    fn saturation_flags() {
        let phi = gen_phi(3, 8, 8).unwrap();
        let y = measure(&[i16::MAX; 8], &phi).unwrap();
        // any row with at least two agreeing leading signs overflows
        assert!(y.saturation_count() > 0);
        for (v, s) in y.values.iter().zip(&y.saturated) {
            if !s {
                assert!(v.unsigned_abs() <= i16::MAX as u16);
            }
        }
    }

    #[test]
    fn unit_double_buffers() {
        let phi = gen_phi(5, 4, 8).unwrap();
        let mut u = MeasurementUnit::new(&phi);
        for _ in 0..8 {
            u.push(1);
        }
        let first = u.finish().unwrap();
        assert!(u.working.iter().all(|&v| v == 0));
        for _ in 0..8 {
            u.push(0);
        }
        assert_eq!(u.output, first.values);
        assert!(u.finish().unwrap().values.iter().all(|&v| v == 0));
        assert!(u.finish().is_err());
    }
}
