use std::fmt;

use super::{AlgebraError, BivarPoly, Coeff, RationalFunction};

/// Power series in `eps` truncated at an explicit order `K` (inclusive).
///
/// Coefficients `c_0..c_K` are all stored, zeros included. Binary operations
/// require equal orders.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EpsSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> EpsSeries<C> {
    pub fn zero(order: usize) -> Self {
        EpsSeries {
            coeffs: vec![C::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        EpsSeries::constant(C::one(), order)
    }

    pub fn constant(c: C, order: usize) -> Self {
        let mut s = EpsSeries::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c * eps^k`; zero if `k` exceeds the order.
    pub fn monomial(c: C, k: usize, order: usize) -> Self {
        let mut s = EpsSeries::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Pads with zeros or truncates to `order`.
    pub fn from_coeffs(mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.resize(order + 1, C::zero());
        EpsSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: C) {
        self.coeffs[k] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(C::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        EpsSeries::from_coeffs(self.coeffs.clone(), order)
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.order() != other.order() {
            return Err(AlgebraError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        Ok(self.zip(other, C::add))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        Ok(self.zip(other, C::sub))
    }

    pub fn neg(&self) -> Self {
        self.map(C::neg)
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|v| v.mul(c))
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> EpsSeries<D> {
        EpsSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        EpsSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// Cauchy product truncated at the shared order.
    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        let mut out: EpsSeries<C> = EpsSeries::zero(k);
        for (i, a) in self.coeffs.iter().enumerate().take(k + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(k + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out.coeffs[i + j] = out.coeffs[i + j].add(&a.mul(b));
            }
        }
        out
    }

    /// Multiplicative inverse at the same order; `c_0` must be a unit of `C`.
    pub fn invert(&self) -> Result<Self, AlgebraError> {
        let inv0 = self.coeffs[0]
            .try_inverse()
            .ok_or(AlgebraError::NonInvertibleSeries)?;
        let k = self.order();
        let mut out: EpsSeries<C> = EpsSeries::zero(k);
        out.coeffs[0] = inv0.clone();
        for n in 1..=k {
            let mut acc = C::zero();
            for i in 1..=n {
                if self.coeffs[i].is_zero() || out.coeffs[n - i].is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[i].mul(&out.coeffs[n - i]));
            }
            out.coeffs[n] = acc.mul(&inv0).neg();
        }
        Ok(out)
    }

    /// Term-wise `d/d eps`; the result keeps the order, and its top
    /// coefficient is zero because `c_{K+1}` is unknown.
    pub fn derivative(&self) -> Self {
        let k = self.order();
        let mut out: EpsSeries<C> = EpsSeries::zero(k);
        for i in 1..=k {
            out.coeffs[i - 1] = self.coeffs[i].mul(&C::from_rational(super::q(i as i64, 1)));
        }
        out
    }

    pub fn partial(&self, var: super::Var) -> Self {
        self.map(|c| c.partial(var))
    }
}

impl EpsSeries<BivarPoly> {
    /// Moves to rational-function coefficients.
    pub fn lift(&self) -> EpsSeries<RationalFunction> {
        self.map(|p| RationalFunction::from_poly(p.clone()))
    }

    /// Inverse, lifting to rational-function coefficients when `c_0` is not
    /// a nonzero constant.
    pub fn invert_lifted(&self) -> Result<EpsSeries<RationalFunction>, AlgebraError> {
        self.lift().invert()
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for EpsSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "eps ({c})")?,
                _ => write!(f, "eps^{k} ({c})")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(eps^{})", self.order() + 1)
    }
}
