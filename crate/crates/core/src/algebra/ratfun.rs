use std::fmt;

use num_traits::One;

use super::gcd::poly_gcd;
use super::{BivarPoly, Coeff, Rational, Var};

/// Quotient of bivariate polynomials in lowest terms.
///
/// The denominator is nonzero with graded-lex leading coefficient 1, and
/// `gcd(num, den) = 1`, so derived equality is equality of functions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: BivarPoly,
    den: BivarPoly,
}

impl RationalFunction {
    /// `None` when `den` is the zero polynomial.
    pub fn new(num: BivarPoly, den: BivarPoly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(RationalFunction { num, den }.normalize())
    }

    pub fn from_poly(p: BivarPoly) -> Self {
        RationalFunction {
            num: p,
            den: BivarPoly::one(),
        }
    }

    pub fn numerator(&self) -> &BivarPoly {
        &self.num
    }

    pub fn denominator(&self) -> &BivarPoly {
        &self.den
    }

    /// Polynomial value if the denominator is 1.
    pub fn as_poly(&self) -> Option<&BivarPoly> {
        self.den.is_one_poly().then_some(&self.num)
    }

    /// Cancels the gcd and makes the denominator monic. Idempotent.
    pub fn normalize(self) -> Self {
        if self.num.is_zero() {
            return RationalFunction::from_poly(BivarPoly::zero());
        }
        let g = poly_gcd(&self.num, &self.den);
        let (num, den) = if g.is_one_poly() {
            (self.num, self.den)
        } else {
            (
                self.num.exact_div(&g).expect("gcd divides numerator"),
                self.den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_term().expect("nonzero denominator").1.recip();
        RationalFunction {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn recip(&self) -> Option<Self> {
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.num.eval_f64(x, y) / self.den.eval_f64(x, y)
    }
}

impl BivarPoly {
    pub fn is_one_poly(&self) -> bool {
        self.len() == 1 && self.constant_term().is_one()
    }
}

impl Coeff for RationalFunction {
    fn zero() -> Self {
        RationalFunction::from_poly(BivarPoly::zero())
    }

    fn one() -> Self {
        RationalFunction::from_poly(BivarPoly::one())
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return RationalFunction {
                num: &self.num + &other.num,
                den: self.den.clone(),
            }
            .normalize();
        }
        RationalFunction {
            num: &self.num * &other.den + &other.num * &self.den,
            den: &self.den * &other.den,
        }
        .normalize()
    }

    fn neg(&self) -> Self {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Coeff::zero();
        }
        RationalFunction {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        }
        .normalize()
    }

    fn partial(&self, var: Var) -> Self {
        let num = &self.num.partial(var) * &self.den - &self.num * &self.den.partial(var);
        RationalFunction {
            num,
            den: &self.den * &self.den,
        }
        .normalize()
    }

    fn from_rational(c: Rational) -> Self {
        RationalFunction::from_poly(BivarPoly::constant(c))
    }

    fn try_inverse(&self) -> Option<Self> {
        self.recip()
    }
}

impl From<BivarPoly> for RationalFunction {
    fn from(p: BivarPoly) -> Self {
        RationalFunction::from_poly(p)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one_poly() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RationalFunction {
        s.parse().unwrap()
    }

    #[test]
    fn cancels_common_factors() {
        let a = r("(x^2 - y^2)/(3x + 3y)");
        assert_eq!(a, r("(1/3 x - 1/3 y)/(1)"));
        assert_eq!(a.denominator(), &BivarPoly::one());
    }

    #[test]
    fn arithmetic() {
        let a = r("(1)/(x)");
        let b = r("(1)/(y)");
        assert_eq!(a.add(&b), r("(x + y)/(x y)"));
        assert_eq!(a.mul(&r("x")), Coeff::one());
        assert_eq!(r("(x)/(y)").partial(Var::Y), r("(-x)/(y^2)"));
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn display_form() {
        assert_eq!(r("(2x)/(4y + 2)").to_string(), "(1/2 x)/(y + 1/2)");
        assert_eq!(r("(x)").to_string(), "x");
    }
}
