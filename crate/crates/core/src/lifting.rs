//! One-dimensional 9/7 (flipping lifting) and Haar transforms.
//!
//! The 9/7 cascade divides every predict/update step by its lifting constant so
//! that each step is `k * center + neighbour + neighbour`:
//!
//! ```text
//! H1[n] = a'·X[2n+1] + X[2n+2] + X[2n]
//! L1[n] = b'·X[2n]   + H1[n-1] + H1[n]
//! H2[n] = c'·H1[n]   + L1[n]   + L1[n+1]
//! L2[n] = d'·L1[n]   + H2[n-1] + H2[n]
//! H = K0·H2,  L = K1·L2
//! ```
//!
//! Boundaries use whole-sample symmetric extension, so `X[-1] = X[1]`,
//! `X[N] = X[N-2]` and the same reflection on every intermediate sequence.

use std::fmt;
use std::str::FromStr;

use crate::arith::{dequantize_coeff, quantize_coeff, FloatArith, LiftArith, Multiplier};
use crate::error::{ensure, Error, Result};

pub const ALPHA: f64 = -1.586134342;
pub const BETA: f64 = -0.052980118;
pub const GAMMA: f64 = 0.8829110762;
pub const DELTA: f64 = 0.4435068522;
pub const ZETA: f64 = 1.149604398;

/// Adopted shift-add values of the four lifting multipliers.
pub const ADOPTED_A: f64 = -0.6328;
pub const ADOPTED_B: f64 = 12.0;
pub const ADOPTED_C: f64 = -21.375;
pub const ADOPTED_D: f64 = 2.565;

const MODULE: &str = "lifting_core";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CoeffMode {
    #[default]
    FloatExact,
    FixedAdopted,
}

impl CoeffMode {
    pub const NAMES: [&'static str; 2] = ["float", "fixed"];

    pub fn name(self) -> &'static str {
        match self {
            CoeffMode::FloatExact => "float",
            CoeffMode::FixedAdopted => "fixed",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            CoeffMode::FloatExact => 0,
            CoeffMode::FixedAdopted => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(CoeffMode::FloatExact),
            1 => Some(CoeffMode::FixedAdopted),
            _ => None,
        }
    }
}

impl fmt::Display for CoeffMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoeffMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" | "float-exact" => Ok(CoeffMode::FloatExact),
            "fixed" | "fixed-adopted" => Ok(CoeffMode::FixedAdopted),
            other => Err(Error::validation(
                MODULE,
                format!("unknown coefficient mode {other:?} (expected one of {:?})", Self::NAMES),
            )),
        }
    }
}

/// Lifting multipliers, scaling factors and Haar scales for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftingCoeffs {
    pub a_prime: f64,
    pub b_prime: f64,
    pub c_prime: f64,
    pub d_prime: f64,
    pub k0: f64,
    pub k1: f64,
    /// Haar low-pass scale, √2.
    pub haar_low: f64,
    /// Haar high-pass scale, 1/√2.
    pub haar_high: f64,
    pub mode: CoeffMode,
}

impl LiftingCoeffs {
    pub fn float_exact() -> Self {
        LiftingCoeffs {
            a_prime: 1.0 / ALPHA,
            b_prime: 1.0 / (ALPHA * BETA),
            c_prime: 1.0 / (BETA * GAMMA),
            d_prime: 1.0 / (GAMMA * DELTA),
            k0: ALPHA * BETA * GAMMA / ZETA,
            k1: ALPHA * BETA * GAMMA * DELTA * ZETA,
            haar_low: std::f64::consts::SQRT_2,
            haar_high: std::f64::consts::FRAC_1_SQRT_2,
            mode: CoeffMode::FloatExact,
        }
    }

    /// Adopted multipliers; the scaling factors and Haar scales stay exact.
    pub fn fixed_adopted() -> Self {
        LiftingCoeffs {
            a_prime: ADOPTED_A,
            b_prime: ADOPTED_B,
            c_prime: ADOPTED_C,
            d_prime: ADOPTED_D,
            mode: CoeffMode::FixedAdopted,
            ..Self::float_exact()
        }
    }

    pub fn for_mode(mode: CoeffMode) -> Self {
        match mode {
            CoeffMode::FloatExact => Self::float_exact(),
            CoeffMode::FixedAdopted => Self::fixed_adopted(),
        }
    }

    /// The values a fixed-point datapath actually multiplies by: every
    /// constant rounded to the coefficient word length.
    pub fn quantized(&self) -> Self {
        let q = |v: f64| dequantize_coeff(quantize_coeff(v));
        LiftingCoeffs {
            a_prime: q(self.a_prime),
            b_prime: q(self.b_prime),
            c_prime: q(self.c_prime),
            d_prime: q(self.d_prime),
            k0: q(self.k0),
            k1: q(self.k1),
            haar_low: q(self.haar_low),
            haar_high: q(self.haar_high),
            mode: self.mode,
        }
    }
}

/// Whole-sample symmetric extension: reflect about the first and last samples
/// without repeating them.
pub fn symmetric_extend<T: Copy>(x: &[T], left: usize, right: usize) -> Result<Vec<T>> {
    ensure!(!x.is_empty(), MODULE, "cannot extend an empty signal");
    ensure!(
        left < x.len() && right < x.len(),
        MODULE,
        "extension ({left}, {right}) too long for a signal of length {}",
        x.len()
    );
    let n = x.len();
    let mut out = Vec::with_capacity(n + left + right);
    out.extend((1..=left).rev().map(|i| x[i]));
    out.extend_from_slice(x);
    out.extend((1..=right).map(|i| x[n - 1 - i]));
    Ok(out)
}

fn check_len(n: usize) -> Result<()> {
    ensure!(n >= 2 && n % 2 == 0, MODULE, "signal length must be even and at least 2, got {n}");
    Ok(())
}

/// Forward 9/7 over any datapath arithmetic. `x.len()` must be even and ≥ 2.
///
/// The operand order of every addition is fixed; the strip simulator evaluates
/// the same expressions and relies on that for bit-exact agreement.
pub fn forward_97_with<A: LiftArith>(ar: &A, x: &[A::Word]) -> (Vec<A::Word>, Vec<A::Word>) {
    let half = x.len() / 2;
    let last = half - 1;
    let even = |n: usize| x[2 * n];
    // X[N] reflects to X[N-2]
    let even_right = |n: usize| if n == last { x[2 * n] } else { x[2 * n + 2] };

    let h1: Vec<_> = (0..half)
        .map(|n| ar.lift(Multiplier::A, x[2 * n + 1], even_right(n), even(n)))
        .collect();
    let l1: Vec<_> = (0..half)
        .map(|n| ar.lift(Multiplier::B, x[2 * n], h1[n.saturating_sub(1)], h1[n]))
        .collect();
    let h2: Vec<_> = (0..half)
        .map(|n| ar.lift(Multiplier::C, h1[n], l1[n], l1[(n + 1).min(last)]))
        .collect();
    let l2: Vec<_> = (0..half)
        .map(|n| ar.lift(Multiplier::D, l1[n], h2[n.saturating_sub(1)], h2[n]))
        .collect();

    let low = l2.iter().map(|&v| ar.mul(Multiplier::K1, v)).collect();
    let high = h2.iter().map(|&v| ar.mul(Multiplier::K0, v)).collect();
    (low, high)
}

/// Forward 9/7 in floating point with the given coefficients.
pub fn forward_97(x: &[f64], coeffs: &LiftingCoeffs) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(x.len())?;
    Ok(forward_97_with(&FloatArith::new(coeffs), x))
}

/// Exact algebraic inverse of [`forward_97`] for the same coefficients.
pub fn inverse_97(low: &[f64], high: &[f64], coeffs: &LiftingCoeffs) -> Result<Vec<f64>> {
    ensure!(
        low.len() == high.len(),
        MODULE,
        "low/high length mismatch: {} vs {}",
        low.len(),
        high.len()
    );
    ensure!(!low.is_empty(), MODULE, "empty sub-bands");
    let half = low.len();
    let last = half - 1;
    let c = coeffs;

    let l2: Vec<f64> = low.iter().map(|v| v / c.k1).collect();
    let h2: Vec<f64> = high.iter().map(|v| v / c.k0).collect();
    let l1: Vec<f64> = (0..half)
        .map(|n| (l2[n] - h2[n.saturating_sub(1)] - h2[n]) / c.d_prime)
        .collect();
    let h1: Vec<f64> = (0..half)
        .map(|n| (h2[n] - l1[n] - l1[(n + 1).min(last)]) / c.c_prime)
        .collect();
    let xe: Vec<f64> = (0..half)
        .map(|n| (l1[n] - h1[n.saturating_sub(1)] - h1[n]) / c.b_prime)
        .collect();

    let mut x = vec![0.0; 2 * half];
    for n in 0..half {
        let right = xe[(n + 1).min(last)];
        x[2 * n] = xe[n];
        x[2 * n + 1] = (h1[n] - right - xe[n]) / c.a_prime;
    }
    Ok(x)
}

/// Haar lifting over any datapath arithmetic: predict `d = x1 - x0`, update
/// `s = x0 + d/2`, then scale.
#[inline]
pub fn forward_haar_with<A: LiftArith>(ar: &A, x0: A::Word, x1: A::Word) -> (A::Word, A::Word) {
    let d = ar.sub(x1, x0);
    let s = ar.add(x0, ar.half(d));
    (ar.mul(Multiplier::Sqrt2, s), ar.mul(Multiplier::InvSqrt2, d))
}

pub fn forward_haar(x0: f64, x1: f64) -> (f64, f64) {
    forward_haar_with(&FloatArith::new(&LiftingCoeffs::float_exact()), x0, x1)
}

/// Inverse Haar with explicit scales, for decoders that must match a
/// quantized encoder.
#[inline]
pub fn inverse_haar_with(coeffs: &LiftingCoeffs, low: f64, high: f64) -> (f64, f64) {
    let s = low / coeffs.haar_low;
    let d = high / coeffs.haar_high;
    let x0 = s - d * 0.5;
    (x0, x0 + d)
}

pub fn inverse_haar(low: f64, high: f64) -> (f64, f64) {
    inverse_haar_with(&LiftingCoeffs::float_exact(), low, high)
}
