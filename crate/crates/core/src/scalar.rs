//! Exact-or-floating scalars.
//!
//! An algebra (and everything derived from it) runs wholly in exact rational
//! arithmetic or wholly in floating point with a declared tolerance. The two
//! modes never mix inside one computation; mixing is a construction error.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic mode of an algebra and all values derived from it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarMode {
    Exact,
    Float,
}

/// A single scalar value, exact rational or floating.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero(mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Exact => Scalar::Exact(BigRational::zero()),
            ScalarMode::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(mode: ScalarMode) -> Self {
        Scalar::from_int(1).into_mode(mode)
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn mode(&self) -> ScalarMode {
        match self {
            Scalar::Exact(_) => ScalarMode::Exact,
            Scalar::Float(_) => ScalarMode::Float,
        }
    }

    /// Convert to the requested mode. Exact → Float is lossy; Float → Exact
    /// is not permitted and panics (mode is decided at construction time).
    pub fn into_mode(self, mode: ScalarMode) -> Self {
        match (self, mode) {
            (s @ Scalar::Exact(_), ScalarMode::Exact) => s,
            (Scalar::Exact(r), ScalarMode::Float) => Scalar::Float(rational_to_f64(&r)),
            (s @ Scalar::Float(_), ScalarMode::Float) => s,
            (Scalar::Float(_), ScalarMode::Exact) => {
                panic!("cannot promote a floating scalar to exact mode")
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Float(v) => *v,
        }
    }

    pub fn as_exact(&self) -> &BigRational {
        match self {
            Scalar::Exact(r) => r,
            Scalar::Float(_) => panic!("floating scalar where exact was required"),
        }
    }

    /// Zero test: exact in exact mode, |v| <= tol in floating mode.
    pub fn is_zero(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(v) => v.abs() <= tol,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(v) => Scalar::Float(v.abs()),
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64()
        .unwrap_or_else(|| r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap())
}

fn binop(a: Scalar, b: Scalar, fe: fn(BigRational, BigRational) -> BigRational, ff: fn(f64, f64) -> f64) -> Scalar {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(fe(x, y)),
        (Scalar::Float(x), Scalar::Float(y)) => Scalar::Float(ff(x, y)),
        _ => panic!("scalar mode mismatch: exact and floating values cannot mix"),
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        binop(self, rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        binop(self, rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        binop(self, rhs, |a, b| a * b, |a, b| a * b)
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        binop(self, rhs, |a, b| a / b, |a, b| a / b)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(v) => Scalar::Float(-v),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}", r),
            Scalar::Float(v) => write!(f, "{}", v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_is_exact() {
        let a = Scalar::from_ratio(1, 3);
        let b = Scalar::from_ratio(2, 3);
        assert_eq!(a + b, Scalar::from_int(1));
    }

    #[test]
    #[should_panic(expected = "mode mismatch")]
    fn mixing_modes_panics() {
        let _ = Scalar::from_int(1) + Scalar::Float(1.0);
    }

    #[test]
    fn zero_test_respects_tolerance() {
        assert!(Scalar::Float(1e-12).is_zero(1e-10));
        assert!(!Scalar::Float(1e-8).is_zero(1e-10));
        assert!(!Scalar::from_ratio(1, 1_000_000_000_000).is_zero(1e-10));
    }
}
