//! Binary fixed-point arithmetic on big integers.
//!
//! The exp-G weights are alternating sums whose terms grow like `2^K` while
//! the quantities of interest are `O(1)`; carrying `K + 128` fractional bits
//! keeps the absolute error far below double precision.

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Fixed {
    bits: u64,
}

impl Fixed {
    pub(crate) fn new(bits: u64) -> Self {
        Self { bits }
    }

    pub(crate) fn one(&self) -> BigInt {
        BigInt::from(1) << self.bits
    }

    pub(crate) fn int(&self, v: i64) -> BigInt {
        BigInt::from(v) << self.bits
    }

    pub(crate) fn from_f64(&self, x: f64) -> BigInt {
        assert!(x.is_finite(), "fixed-point conversion of non-finite value");
        if x == 0.0 {
            return BigInt::zero();
        }
        let raw = x.abs().to_bits();
        let exp_field = ((raw >> 52) & 0x7ff) as i64;
        let frac = raw & ((1u64 << 52) - 1);
        let (mantissa, exp) = if exp_field == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_field - 1075)
        };
        let shift = exp + self.bits as i64;
        let mag = BigInt::from(mantissa);
        let mag = if shift >= 0 {
            mag << shift as u64
        } else {
            mag >> (-shift) as u64
        };
        if x < 0.0 {
            -mag
        } else {
            mag
        }
    }

    pub(crate) fn to_f64(&self, v: &BigInt) -> f64 {
        if v.is_zero() {
            return 0.0;
        }
        let n = v.bits();
        let drop = n.saturating_sub(64);
        let top = (v.abs() >> drop).to_u64().expect("at most 64 bits remain");
        let mag = ldexp(top as f64, drop as i64 - self.bits as i64);
        if v.sign() == Sign::Minus {
            -mag
        } else {
            mag
        }
    }

    pub(crate) fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}
