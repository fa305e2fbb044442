use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

/// Coordinate of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

/// Exponent pair `x^a y^b`.
///
/// Ordered graded-lexicographically with `x > y`: total degree first, then
/// the exponent of `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub x: u32,
    pub y: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { x: 0, y: 0 };

    pub const fn new(x: u32, y: u32) -> Self {
        Monomial { x, y }
    }

    pub fn degree(&self) -> u32 {
        self.x + self.y
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::new(self.x + other.x, self.y + other.y)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if self.x >= other.x && self.y >= other.y {
            Some(Monomial::new(self.x - other.x, self.y - other.y))
        } else {
            None
        }
    }

    /// All monomials of exact total degree `d`, descending in graded-lex order.
    pub fn of_degree(d: u32) -> impl Iterator<Item = Monomial> {
        (0..=d).rev().map(move |a| Monomial::new(a, d - a))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.x.cmp(&other.x))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact polynomial in `x, y` over the rationals.
///
/// Zero coefficients are never stored, so derived equality is mathematical
/// equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BivarPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        BivarPoly::default()
    }

    pub fn one() -> Self {
        BivarPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        BivarPoly::term(c, Monomial::ONE)
    }

    pub fn from_int(c: i64) -> Self {
        BivarPoly::constant(Rational::from_integer(BigInt::from(c)))
    }

    pub fn x() -> Self {
        BivarPoly::monomial(1, 0)
    }

    pub fn y() -> Self {
        BivarPoly::monomial(0, 1)
    }

    pub fn monomial(a: u32, b: u32) -> Self {
        BivarPoly::term(Rational::one(), Monomial::new(a, b))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = BivarPoly::zero();
        p.add_term(m, c);
        p
    }

    /// Builds a polynomial from `(coefficient, x-exponent, y-exponent)` triples.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Rational, u32, u32)>,
    {
        let mut p = BivarPoly::zero();
        for (c, a, b) in terms {
            p.add_term(Monomial::new(a, b), c);
        }
        p
    }

    /// The Hamiltonian `x^2 + y^2` of the circle family.
    pub fn circle_hamiltonian() -> Self {
        BivarPoly::monomial(2, 0) + BivarPoly::monomial(0, 2)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Monomial::ONE)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::ONE)
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    pub fn degree_in(&self, var: Var) -> Option<u32> {
        self.terms
            .keys()
            .map(|m| match var {
                Var::X => m.x,
                Var::Y => m.y,
            })
            .max()
    }

    /// Largest monomial in graded-lex order with its coefficient.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// The homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> BivarPoly {
        BivarPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> BivarPoly {
        if c.is_zero() {
            return BivarPoly::zero();
        }
        BivarPoly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> BivarPoly {
        BivarPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.mul(m), v.clone()))
                .collect(),
        }
    }

    pub fn partial(&self, var: Var) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (m, c) in &self.terms {
            let (e, dm) = match var {
                Var::X if m.x > 0 => (m.x, Monomial::new(m.x - 1, m.y)),
                Var::Y if m.y > 0 => (m.y, Monomial::new(m.x, m.y - 1)),
                _ => continue,
            };
            out.add_term(dm, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    pub fn pow(&self, n: u32) -> BivarPoly {
        let mut acc = BivarPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    ///
    /// Single-divisor multivariate division: the remainder is zero exactly
    /// when `d` divides `self`.
    pub fn exact_div(&self, d: &BivarPoly) -> Option<BivarPoly> {
        let (lm, lc) = d.leading_term()?;
        let (lm, lc) = (*lm, lc.clone());
        let mut rem = self.clone();
        let mut quot = BivarPoly::zero();
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            let step = d.mul_monomial(&qm).scale(&qc);
            rem = &rem - &step;
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            acc += c
                * num_traits::pow(x.clone(), m.x as usize)
                * num_traits::pow(y.clone(), m.y as usize);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| super::rational_to_f64(c) * x.powi(m.x as i32) * y.powi(m.y as i32))
            .sum()
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms.values().fold(BigInt::one(), |acc, c| {
            num_integer::lcm(acc, c.denom().clone())
        })
    }

    /// Makes the leading coefficient 1; zero stays zero.
    pub fn monic(&self) -> BivarPoly {
        match self.leading_term() {
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
            None => BivarPoly::zero(),
        }
    }
}

impl Add<&BivarPoly> for &BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub<&BivarPoly> for &BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Mul<&BivarPoly> for &BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<BivarPoly> for BivarPoly {
            type Output = BivarPoly;
            fn $f(self, rhs: BivarPoly) -> BivarPoly {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&BivarPoly> for BivarPoly {
            type Output = BivarPoly;
            fn $f(self, rhs: &BivarPoly) -> BivarPoly {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        -&self
    }
}

/// Writes a rational coefficient magnitude, e.g. `2/3`.
pub(crate) fn write_magnitude(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    let c = c.abs();
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

/// Shared term printer for polynomials in one or two variables.
///
/// `vars` yields the `(name, exponent)` factors of each term; terms are
/// expected in the order they should appear.
pub(crate) fn write_terms<'a, I>(f: &mut fmt::Formatter<'_>, terms: I) -> fmt::Result
where
    I: Iterator<Item = (&'a Rational, Vec<(&'static str, u32)>)>,
{
    let mut first = true;
    for (c, factors) in terms {
        let factors: Vec<_> = factors.into_iter().filter(|(_, e)| *e > 0).collect();
        let neg = c.is_negative();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        first = false;
        let unit = c.abs().is_one();
        if !unit || factors.is_empty() {
            write_magnitude(f, c)?;
            if !factors.is_empty() {
                write!(f, " ")?;
            }
        }
        for (i, (name, e)) in factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if *e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Graded-lex descending, coefficients as exact fractions: `2/3 x^3 + x y^2`.
impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            self.terms
                .iter()
                .rev()
                .map(|(m, c)| (c, vec![("x", m.x), ("y", m.y)])),
        )
    }
}

/// Lossy conversion used only at the numeric boundary.
pub(crate) fn big_to_f64(b: &BigInt) -> f64 {
    b.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    fn p(s: &str) -> BivarPoly {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(p("x + y") + p("x - y"), p("2x"));
        assert_eq!(p("x^2 + y^2") * BivarPoly::one(), p("x^2 + y^2"));
        assert_eq!(p("x + y") * p("x - y"), p("x^2 - y^2"));
    }

    #[test]
    fn partial_examples() {
        assert_eq!(p("x^2 + y^2").partial(Var::X), p("2x"));
        assert_eq!(p("7/3").partial(Var::Y), BivarPoly::zero());
        assert_eq!(p("x^3 y^2").partial(Var::X), p("3x^2y^2"));
    }

    #[test]
    fn graded_lex_order() {
        let mut ms = vec![
            Monomial::new(0, 2),
            Monomial::new(2, 0),
            Monomial::new(1, 1),
            Monomial::new(3, 0),
            Monomial::ONE,
        ];
        ms.sort();
        assert_eq!(
            ms,
            vec![
                Monomial::ONE,
                Monomial::new(0, 2),
                Monomial::new(1, 1),
                Monomial::new(2, 0),
                Monomial::new(3, 0)
            ]
        );
    }

    #[test]
    fn display_is_descending_and_exact() {
        assert_eq!(p("x y^2 + 2/3 x^3").to_string(), "2/3 x^3 + x y^2");
        assert_eq!(p("-x^2 + 0").to_string(), "-x^2");
        assert_eq!(BivarPoly::zero().to_string(), "0");
        assert_eq!(p("-1/2 - y").to_string(), "-y - 1/2");
    }

    #[test]
    fn exact_division() {
        let a = p("x^2 + y^2 + 3x y");
        let b = p("2x - y + 1");
        assert_eq!((&a * &b).exact_div(&b), Some(a.clone()));
        assert_eq!(p("x^2 + 1").exact_div(&p("x")), None);
        assert_eq!(BivarPoly::zero().exact_div(&b), Some(BivarPoly::zero()));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut a = p("x");
        a.add_term(Monomial::new(1, 0), q(-1, 1));
        assert!(a.is_zero());
        assert_eq!(a, BivarPoly::zero());
    }
}
