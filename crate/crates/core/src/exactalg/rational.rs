//! Arbitrary-precision rationals.
//!
//! `num-rational` already keeps `BigRational` reduced with a positive
//! denominator, which is exactly the invariant we need, so we only add a few
//! conveniences on top.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(text: &str) -> Result<Rational, AlgebraError> {
    let text = text.trim();
    let bad = || AlgebraError::Parse(format!("not a rational number: {text:?}"));
    match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(AlgebraError::DivisionByZero);
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(text).map_err(|_| bad())?,
        )),
    }
}

/// Exact conversion of a finite binary64 value.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // numerator and denominator too large for a direct conversion
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3").unwrap(), rat(3));
        assert_eq!(parse_rational(" -1/2 ").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("4/-8").unwrap(), ratio(-1, 2));
        assert!(matches!(
            parse_rational("1/0"),
            Err(AlgebraError::DivisionByZero)
        ));
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn canonical_form() {
        let q = ratio(6, -4);
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(2));
        assert_eq!(ratio(0, 5), zero());
        assert_eq!(zero().denom(), &BigInt::from(1));
    }

    #[test]
    fn float_round_trip_is_exact() {
        let q = from_f64(0.1).unwrap();
        assert_eq!(to_f64(&q), 0.1);
        assert_ne!(q, ratio(1, 10));
    }
}
