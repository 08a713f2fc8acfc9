//! Numeric scalar abstraction shared by every solver and certifier.
//!
//! All transport arithmetic is written against [`Scalar`], so the same code
//! runs in `f64`, `f32` or exact `Rational64` arithmetic. Exact rationals make
//! the small oracle instances (and the torus demo) free of rounding.

use std::fmt::{Debug, Display};

use num_rational::Rational64;
use num_traits::{FromPrimitive, Num, NumAssign, Signed, ToPrimitive};

/// A totally-ordered-enough field element usable as cost, mass or potential.
pub trait Scalar:
    Copy
    + PartialOrd
    + Num
    + NumAssign
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Slack allowed when checking that measure weights sum to one.
    fn weight_tolerance() -> Self;

    /// Slack used inside shortest-path constructions.
    fn construction_tolerance() -> Self;

    /// False for NaN and infinities.
    fn is_finite_value(&self) -> bool;

    /// `self^exponent` for `self >= 0`.
    fn pow_real(self, exponent: f64) -> Self;

    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).expect("value representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn weight_tolerance() -> Self {
        1e-12
    }
    fn construction_tolerance() -> Self {
        1e-12
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn pow_real(self, exponent: f64) -> Self {
        self.powf(exponent)
    }
}

impl Scalar for f32 {
    fn weight_tolerance() -> Self {
        1e-6
    }
    fn construction_tolerance() -> Self {
        1e-6
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn pow_real(self, exponent: f64) -> Self {
        self.powf(exponent as f32)
    }
}

impl Scalar for Rational64 {
    fn weight_tolerance() -> Self {
        Rational64::from_integer(0)
    }
    fn construction_tolerance() -> Self {
        Rational64::from_integer(0)
    }
    fn is_finite_value(&self) -> bool {
        true
    }
    /// Exact for integral exponents; otherwise rounded through `f64`.
    fn pow_real(self, exponent: f64) -> Self {
        if exponent.fract() == 0.0 && exponent >= 0.0 && exponent <= i32::MAX as f64 {
            num_traits::pow(self, exponent as usize)
        } else {
            let approx = self.to_f64_lossy().powf(exponent);
            Rational64::approximate_float(approx).expect("power representable as Rational64")
        }
    }
}
