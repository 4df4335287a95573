//! Datapath arithmetic shared by the functional transform and the cycle-level
//! simulator.
//!
//! Both consumers are generic over [`LiftArith`], so a lifting step evaluated by
//! the reference transform and by a simulated processing element is the same
//! sequence of `mul`/`add` calls in the same order. With [`FixedArith`] that
//! makes the two bit-identical; with [`FloatArith`] they agree to the last ulp.

use std::fmt;

use crate::lifting::LiftingCoeffs;

/// Fractional bits of every quantized multiplier (lifting, scaling and Haar).
pub const COEF_FRAC_BITS: u32 = 14;

/// Fractional bits carried by fixed-point data words. Pixels enter as
/// `value << DATA_FRAC_BITS`.
pub const DATA_FRAC_BITS: u32 = 4;

/// The constant multipliers a processing element can apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplier {
    A,
    B,
    C,
    D,
    K0,
    K1,
    Sqrt2,
    InvSqrt2,
}

impl Multiplier {
    pub const ALL: [Multiplier; 8] = [
        Multiplier::A,
        Multiplier::B,
        Multiplier::C,
        Multiplier::D,
        Multiplier::K0,
        Multiplier::K1,
        Multiplier::Sqrt2,
        Multiplier::InvSqrt2,
    ];

    pub fn value(self, coeffs: &LiftingCoeffs) -> f64 {
        match self {
            Multiplier::A => coeffs.a_prime,
            Multiplier::B => coeffs.b_prime,
            Multiplier::C => coeffs.c_prime,
            Multiplier::D => coeffs.d_prime,
            Multiplier::K0 => coeffs.k0,
            Multiplier::K1 => coeffs.k1,
            Multiplier::Sqrt2 => coeffs.haar_low,
            Multiplier::InvSqrt2 => coeffs.haar_high,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Arithmetic of one datapath word type.
pub trait LiftArith: Sync {
    type Word: Copy + Default + PartialEq + fmt::Debug + Send + Sync;

    fn mul(&self, k: Multiplier, w: Self::Word) -> Self::Word;
    fn add(&self, a: Self::Word, b: Self::Word) -> Self::Word;
    fn sub(&self, a: Self::Word, b: Self::Word) -> Self::Word;
    /// `w / 2`, the Haar update step.
    fn half(&self, w: Self::Word) -> Self::Word;
    fn from_f64(&self, v: f64) -> Self::Word;
    fn to_f64(&self, w: Self::Word) -> f64;

    /// Lifting step `(k * center + first) + second`, in that evaluation order.
    #[inline]
    fn lift(&self, k: Multiplier, center: Self::Word, first: Self::Word, second: Self::Word) -> Self::Word {
        self.add(self.add(self.mul(k, center), first), second)
    }
}

/// Double-precision arithmetic over an arbitrary coefficient set.
#[derive(Debug, Clone, Copy)]
pub struct FloatArith {
    k: [f64; 8],
}

impl FloatArith {
    pub fn new(coeffs: &LiftingCoeffs) -> Self {
        let mut k = [0.0; 8];
        for m in Multiplier::ALL {
            k[m.index()] = m.value(coeffs);
        }
        FloatArith { k }
    }
}

impl LiftArith for FloatArith {
    type Word = f64;

    #[inline]
    fn mul(&self, k: Multiplier, w: f64) -> f64 {
        self.k[k.index()] * w
    }
    #[inline]
    fn add(&self, a: f64, b: f64) -> f64 {
        a + b
    }
    #[inline]
    fn sub(&self, a: f64, b: f64) -> f64 {
        a - b
    }
    #[inline]
    fn half(&self, w: f64) -> f64 {
        w * 0.5
    }
    #[inline]
    fn from_f64(&self, v: f64) -> f64 {
        v
    }
    #[inline]
    fn to_f64(&self, w: f64) -> f64 {
        w
    }
}

/// Bit-true fixed-point datapath: 32-bit saturating words with
/// [`DATA_FRAC_BITS`] fractional bits, multipliers quantized to
/// [`COEF_FRAC_BITS`], products rounded half-up.
#[derive(Debug, Clone, Copy)]
pub struct FixedArith {
    q: [i32; 8],
}

impl FixedArith {
    pub fn new(coeffs: &LiftingCoeffs) -> Self {
        let mut q = [0; 8];
        for m in Multiplier::ALL {
            q[m.index()] = quantize_coeff(m.value(coeffs));
        }
        FixedArith { q }
    }

    pub fn quantized(&self, k: Multiplier) -> i32 {
        self.q[k.index()]
    }
}

/// Quantize a multiplier to [`COEF_FRAC_BITS`] fractional bits.
pub fn quantize_coeff(v: f64) -> i32 {
    (v * f64::from(1u32 << COEF_FRAC_BITS)).round() as i32
}

/// Value of a quantized multiplier.
pub fn dequantize_coeff(q: i32) -> f64 {
    f64::from(q) / f64::from(1u32 << COEF_FRAC_BITS)
}

#[inline]
fn saturate(v: i64) -> i32 {
    v.clamp(i64::from(i32::MIN), i64::from(i32::MAX)) as i32
}

impl LiftArith for FixedArith {
    type Word = i32;

    #[inline]
    fn mul(&self, k: Multiplier, w: i32) -> i32 {
        let p = i64::from(w) * i64::from(self.q[k.index()]);
        saturate((p + (1 << (COEF_FRAC_BITS - 1))) >> COEF_FRAC_BITS)
    }
    #[inline]
    fn add(&self, a: i32, b: i32) -> i32 {
        a.saturating_add(b)
    }
    #[inline]
    fn sub(&self, a: i32, b: i32) -> i32 {
        a.saturating_sub(b)
    }
    #[inline]
    fn half(&self, w: i32) -> i32 {
        saturate((i64::from(w) + 1) >> 1)
    }
    #[inline]
    fn from_f64(&self, v: f64) -> i32 {
        saturate((v * f64::from(1u32 << DATA_FRAC_BITS)).round() as i64)
    }
    #[inline]
    fn to_f64(&self, w: i32) -> f64 {
        f64::from(w) / f64::from(1u32 << DATA_FRAC_BITS)
    }
}

/// Round a fixed-point word to the nearest integer (half-up).
pub fn fixed_word_to_int(w: i32) -> i32 {
    saturate((i64::from(w) + (1 << (DATA_FRAC_BITS - 1))) >> DATA_FRAC_BITS)
}
