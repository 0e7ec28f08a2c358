use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::poly::{gcd, Polynomial};
use super::rational::Rational;
use super::AlgebraError;

/// Element of the fraction field `Q(x1, .., xn)`.
///
/// Stored reduced (numerator and denominator coprime) with a monic
/// denominator, so structural equality is equality of functions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if num.nvars() != den.nvars() {
            return Err(AlgebraError::Dimension {
                expected: num.nvars(),
                found: den.nvars(),
            });
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        let n = num.nvars();
        if num.is_zero() {
            return RationalFunction {
                num,
                den: Polynomial::one(n),
            };
        }
        let g = gcd(&num, &den);
        let num = num.div_exact(&g).expect("gcd divides numerator");
        let den = den.div_exact(&g).expect("gcd divides denominator");
        let lead = den.leading_term().expect("nonzero").1.recip();
        RationalFunction {
            num: num.scale(&lead),
            den: den.scale(&lead),
        }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let n = p.nvars();
        RationalFunction {
            num: p,
            den: Polynomial::one(n),
        }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(Polynomial::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(Polynomial::one(nvars))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Value at a point; fails where the denominator vanishes.
    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, AlgebraError> {
        let d = self.den.evaluate(point)?;
        if num_traits::Zero::is_zero(&d) {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(self.num.evaluate(point)? / d)
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        RationalFunction::normalized(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        RationalFunction::normalized(
            &(&self.num * &o.den) - &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        RationalFunction::normalized(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    /// Panics on division by the zero function; use [`RationalFunction::inverse`]
    /// for a checked variant.
    fn div(self, o: &RationalFunction) -> RationalFunction {
        assert!(!o.is_zero(), "division by the zero rational function");
        RationalFunction::normalized(&self.num * &o.den, &self.den * &o.num)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{rat, ratio};

    fn x(i: usize) -> Polynomial {
        Polynomial::var(3, i)
    }

    #[test]
    fn reduces_common_factors() {
        let num = &(&x(0) + &x(1)) * &x(2);
        let den = (&(&x(0) + &x(1)) * &x(0)).scale(&rat(-2));
        let f = RationalFunction::new(num, den).unwrap();
        assert_eq!(f.numerator(), &x(2).scale(&ratio(-1, 2)));
        assert_eq!(f.denominator(), &x(0));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(
            RationalFunction::new(x(0), Polynomial::zero(3)),
            Err(AlgebraError::DivisionByZero)
        ));
    }

    #[test]
    fn field_operations() {
        let a = RationalFunction::new(x(0), &x(1) + &Polynomial::one(3)).unwrap();
        let b = RationalFunction::new(x(2), x(0)).unwrap();
        let s = &(&a + &b) - &b;
        assert_eq!(s, a);
        let q = &(&a * &b) / &b;
        assert_eq!(q, a);
        assert_eq!(&a * &a.inverse().unwrap(), RationalFunction::one(3));
    }
}
