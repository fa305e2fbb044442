//! Exact periods of polynomial 1-forms over the circles `x^2 + y^2 = t`,
//! traversed counterclockwise.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{rational_to_f64, BivarPoly, Rational};
use crate::exterior::Form1Planar;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("unsupported oval family: hamiltonian must be x^2 + y^2, got {0}")]
    UnsupportedOvalFamily(String),
}

/// Family of cycles in the level sets of a hamiltonian. Only the circle
/// family of `x^2 + y^2` is supported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OvalFamily {
    hamiltonian: BivarPoly,
}

impl OvalFamily {
    pub fn new(hamiltonian: BivarPoly) -> Result<Self, AbelianError> {
        if hamiltonian != BivarPoly::circle_hamiltonian() {
            return Err(AbelianError::UnsupportedOvalFamily(hamiltonian.to_string()));
        }
        Ok(OvalFamily { hamiltonian })
    }

    pub fn circle() -> Self {
        OvalFamily {
            hamiltonian: BivarPoly::circle_hamiltonian(),
        }
    }

    pub fn hamiltonian(&self) -> &BivarPoly {
        &self.hamiltonian
    }

    /// `dF`.
    pub fn differential(&self) -> Form1Planar<BivarPoly> {
        Form1Planar::exact(&self.hamiltonian)
    }
}

/// `pi * p(t)` for a rational polynomial `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PeriodPoly {
    // coefficient of t^i at index i, no trailing zeros
    coeffs: Vec<Rational>,
}

impl PeriodPoly {
    pub fn zero() -> Self {
        PeriodPoly::default()
    }

    /// `c * pi * t^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        PeriodPoly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PeriodPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficients of `t^0, t^1, ...` (the factor `pi` excluded).
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        PeriodPoly::from_coeffs((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        PeriodPoly::from_coeffs(self.coeffs.iter().map(|v| v * c).collect())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        let p = self
            .coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + rational_to_f64(c));
        std::f64::consts::PI * p
    }
}

impl fmt::Display for PeriodPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(usize, &Rational)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let power = |k: usize| match k {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{k}"),
        };
        match terms.as_slice() {
            [] => write!(f, "0"),
            [(k, c)] if c.is_one() && *k > 0 => write!(f, "π·{}", power(*k)),
            _ => {
                write!(f, "π·(")?;
                for (n, (k, c)) in terms.iter().enumerate() {
                    let mag = c.abs();
                    if n == 0 {
                        if c.is_negative() {
                            write!(f, "-")?;
                        }
                    } else {
                        write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
                    }
                    let p = power(*k);
                    match (mag.is_one(), p.is_empty()) {
                        (true, true) => write!(f, "1")?,
                        (true, false) => write!(f, "{p}")?,
                        (false, true) => write!(f, "{mag}")?,
                        (false, false) => write!(f, "{mag} {p}")?,
                    }
                }
                write!(f, ")")
            }
        }
    }
}

/// Which differential a monomial multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Differential {
    Dx,
    Dy,
}

fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

/// `(1/2pi) * integral over [0, 2pi] of cos^p sin^q`, for `p, q` even.
fn angular_mean(p: u32, q: u32) -> Rational {
    let (p, q) = (i64::from(p), i64::from(q));
    Rational::new(
        double_factorial(p - 1) * double_factorial(q - 1),
        double_factorial(p + q),
    )
}

/// Exact `integral of x^a y^b d(basis)` over the circle of radius `sqrt(t)`.
pub fn monomial_period(a: u32, b: u32, basis: Differential) -> PeriodPoly {
    // x = sqrt(t) cos, y = sqrt(t) sin, dx = -sqrt(t) sin, dy = sqrt(t) cos
    let (p, q, sign) = match basis {
        Differential::Dx => (a, b + 1, -2),
        Differential::Dy => (a + 1, b, 2),
    };
    if p % 2 == 1 || q % 2 == 1 {
        return PeriodPoly::zero();
    }
    let k = (a + b).div_ceil(2) as usize;
    PeriodPoly::monomial(angular_mean(p, q) * Rational::from_integer(sign.into()), k)
}

/// Period of a polynomial 1-form over the family's cycles.
pub fn period_of_form(w: &Form1Planar<BivarPoly>, fam: &OvalFamily) -> PeriodPoly {
    debug_assert_eq!(fam.hamiltonian(), &BivarPoly::circle_hamiltonian());
    let mut out = PeriodPoly::zero();
    for (poly, basis) in [(&w.p, Differential::Dx), (&w.q, Differential::Dy)] {
        for (m, c) in poly.terms() {
            out = out.add(&monomial_period(m.x, m.y, basis).scale(c));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    fn p(s: &str) -> BivarPoly {
        s.parse().unwrap()
    }

    #[test]
    fn monomial_examples() {
        assert!(monomial_period(1, 0, Differential::Dx).is_zero());
        assert_eq!(
            monomial_period(0, 1, Differential::Dx),
            PeriodPoly::monomial(q(-1, 1), 1)
        );
        assert_eq!(
            monomial_period(2, 1, Differential::Dx),
            PeriodPoly::monomial(q(-1, 4), 2)
        );
        // x dy encloses the area
        assert_eq!(
            monomial_period(1, 0, Differential::Dy),
            PeriodPoly::monomial(q(1, 1), 1)
        );
    }

    #[test]
    fn form_examples() {
        let fam = OvalFamily::circle();
        let y2dx = Form1Planar::new(p("y^2"), BivarPoly::zero());
        assert!(period_of_form(&y2dx, &fam).is_zero());
        let dh = Form1Planar::exact(&p("x^3 y^2"));
        assert!(period_of_form(&dh, &fam).is_zero());
        let ydx = Form1Planar::new(p("y"), BivarPoly::zero());
        assert_eq!(period_of_form(&ydx, &fam).to_string(), "π·(-t)");
    }

    #[test]
    fn rejects_other_hamiltonians() {
        assert!(matches!(
            OvalFamily::new(p("x^2 + 2y^2")),
            Err(AbelianError::UnsupportedOvalFamily(_))
        ));
        assert!(OvalFamily::new(p("y^2 + x^2")).is_ok());
    }

    #[test]
    fn display() {
        assert_eq!(PeriodPoly::zero().to_string(), "0");
        assert_eq!(PeriodPoly::monomial(q(1, 1), 1).to_string(), "π·t");
        assert_eq!(PeriodPoly::monomial(q(1, 2), 2).to_string(), "π·(1/2 t^2)");
        let two = PeriodPoly::from_coeffs(vec![q(3, 1), q(-1, 1), q(1, 4)]);
        assert_eq!(two.to_string(), "π·(1/4 t^2 - t + 3)");
    }
}
