//! Exact coefficient arithmetic: rationals, bivariate polynomials, rational
//! functions and truncated series in `eps`.

mod gcd;
pub mod linsolve;
mod parse;
mod poly;
mod ratfun;
mod series;

use num_bigint::BigInt;
use thiserror::Error;

pub use gcd::poly_gcd;
pub use parse::{parse_poly, parse_rational_function, ParseError};
pub use poly::{BivarPoly, Monomial, Var};
pub use ratfun::RationalFunction;
pub use series::EpsSeries;

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("series orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
    #[error("series constant term is not invertible")]
    NonInvertibleSeries,
}

/// `n/d` as a [`Rational`].
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64()
        .unwrap_or_else(|| poly::big_to_f64(r.numer()) / poly::big_to_f64(r.denom()))
}

/// Commutative coefficient ring with partial derivatives in `x` and `y`.
///
/// Implemented by [`BivarPoly`] and [`RationalFunction`]; series and
/// differential forms are generic over it.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn partial(&self, var: Var) -> Self;
    fn from_rational(c: Rational) -> Self;
    /// Multiplicative inverse, when it exists in the ring.
    fn try_inverse(&self) -> Option<Self>;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl Coeff for BivarPoly {
    fn zero() -> Self {
        BivarPoly::zero()
    }

    fn one() -> Self {
        BivarPoly::one()
    }

    fn is_zero(&self) -> bool {
        BivarPoly::is_zero(self)
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn neg(&self) -> Self {
        -self
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn sub(&self, other: &Self) -> Self {
        self - other
    }

    fn partial(&self, var: Var) -> Self {
        BivarPoly::partial(self, var)
    }

    fn from_rational(c: Rational) -> Self {
        BivarPoly::constant(c)
    }

    fn try_inverse(&self) -> Option<Self> {
        if self.is_constant() && !self.is_zero() {
            Some(BivarPoly::constant(self.constant_term().recip()))
        } else {
            None
        }
    }
}
