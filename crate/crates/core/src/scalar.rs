//! Coefficient fields.
//!
//! Everything algebraic is generic over [`Scalar`], implemented for exact
//! rationals ([`Rational`]) and for `f64`. Identities the theory states as
//! exact equalities (the conditions on the basis, qS tests, polynomial
//! rewriting) are meant to be run over [`Rational`]; quadrature runs over
//! `f64`.

use std::fmt::{Debug, Display};
use std::ops::{Div, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Relative threshold below which a float is treated as zero.
pub const FLOAT_ZERO_TOL: f64 = 1e-12;

pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Div<Output = Self>
{
    /// Whether arithmetic in this field is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;

    /// Zero test: literal in exact mode, relative to `scale` for floats.
    fn is_negligible(&self, scale: f64) -> bool;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, scale: f64) -> bool {
        self.abs() <= FLOAT_ZERO_TOL * scale.max(1.0)
    }
}

/// Parses `"num/den"`, `"num"` or a decimal integer string into a rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let parse_int = |s: &str| {
        s.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("not a rational: {text:?}")))
    };
    match text.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {text:?}")));
            }
            Ok(Rational::new(parse_int(num)?, den))
        }
        None => Ok(Rational::from_integer(parse_int(text)?)),
    }
}

/// Formats a rational the way documents encode them: `"n"` or `"n/d"`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        let r = parse_rational("-3/6").unwrap();
        assert_eq!(format_rational(&r), "-1/2");
        assert_eq!(format_rational(&parse_rational(" 7 ").unwrap()), "7");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn negligible() {
        assert!(Rational::zero().is_negligible(1.0));
        assert!(!Rational::new(1.into(), 1_000_000_000.into()).is_negligible(1.0));
        assert!(1e-14_f64.is_negligible(1.0));
        assert!(!1e-6_f64.is_negligible(1.0));
    }
}
