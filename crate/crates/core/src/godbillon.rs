//! Godbillon-Vey side of the correspondence.
//!
//! The deformed form is `Omega = R deps + (dF + eps w) G` with
//! `G = 1 + eps G_1 + eps^2 G_2 + ...` and `R = R_1 + eps R_2 + ...`.
//!
//! Order convention: a form is integrable "to order `k`" when
//! `Omega ^ d~Omega` has no term of weight `<= k + 1`. That involves
//! `R_1..R_{k+1}` and `G_0..G_k` (the coefficient `G_{k+1}` drops out), and
//! it is solvable exactly when `M_1..M_{k+1}` vanish. Every form built
//! here for order `k` is therefore stored to `eps`-order `k + 1`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::abelian::{AbelianError, OvalFamily};
use crate::algebra::linsolve::{solve, LinearOutcome};
use crate::algebra::{q, BivarPoly, Coeff, EpsSeries, Monomial, Rational, RationalFunction, Var};
use crate::exterior::{d_planar, Basis, Form1Planar, Form2Planar, FormEps, WeightBound};
use crate::francoise::{FrancoiseError, FrancoisePair, FrancoiseSequence};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GodbillonError {
    #[error("need {needed} pairs, have {available}")]
    InsufficientPairs { needed: usize, available: usize },
    #[error("form stored to order {available}, need at least {needed}")]
    OrderTooLow { needed: usize, available: usize },
    #[error("integrability obstructed at order {order}")]
    ObstructionAtOrder { order: usize },
    #[error("form is not integrable at weight {weight}")]
    NotIntegrable { weight: usize },
    #[error("no integrating factor at weight {weight}")]
    NoFactorExists { weight: usize },
    #[error("form is not of the shape R deps + G (dF + eps w) at order {order}")]
    NotDeformationShape { order: usize },
    #[error("first eps-coefficient of the first integral vanishes")]
    DegenerateNormalization,
    #[error(transparent)]
    Family(#[from] AbelianError),
    #[error(transparent)]
    Francoise(#[from] FrancoiseError),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Coefficients `(G_i, R_i)` of `eps^i` in `G` and of `eps^(i-1) deps` in
/// `R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GVPair {
    pub g: BivarPoly,
    pub r: BivarPoly,
}

fn sign(i: usize) -> i64 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `G_i = (-1)^i g_i`, `R_i = (-1)^(i+1) i r_i`.
pub fn gv_pairs_from_francoise(seq: &FrancoiseSequence) -> Vec<GVPair> {
    seq.pairs()
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let i = j + 1;
            GVPair {
                g: p.g().scale(&q(sign(i), 1)),
                r: p.r().scale(&q(-sign(i) * i as i64, 1)),
            }
        })
        .collect()
}

/// Inverse of [`gv_pairs_from_francoise`], checking every pair.
pub fn francoise_from_gv(
    fam: &OvalFamily,
    w: &Form1Planar<BivarPoly>,
    pairs: &[GVPair],
) -> Result<Vec<FrancoisePair>, GodbillonError> {
    let mut out: Vec<FrancoisePair> = Vec::new();
    let mut prev = BivarPoly::one();
    for (j, p) in pairs.iter().enumerate() {
        let i = j + 1;
        let g = p.g.scale(&q(sign(i), 1));
        let r = p.r.scale(&q(sign(i + 1), i as i64));
        let pair = FrancoisePair::verified(&w.scale(&prev), g, r, fam)?;
        prev = pair.g().clone();
        out.push(pair);
    }
    Ok(out)
}

/// `R deps + (dF + eps w) G` at `eps`-order `order`, from `G_0..` and
/// `R_1..`; missing coefficients are zero.
fn assemble_chains(
    fam: &OvalFamily,
    w: &Form1Planar<BivarPoly>,
    g: &[BivarPoly],
    r: &[BivarPoly],
    order: usize,
) -> FormEps<BivarPoly> {
    let df = fam.differential();
    let gs = EpsSeries::from_coeffs(g.to_vec(), order);
    let rs = EpsSeries::from_coeffs(r.to_vec(), order);
    let eta = |a: &BivarPoly, b: &BivarPoly| {
        EpsSeries::from_coeffs(vec![a.clone(), b.clone()], order).mul_unchecked(&gs)
    };
    FormEps::one_form(eta(&df.p, &w.p), eta(&df.q, &w.q), rs)
}

/// `Omega` for order `k`, stored to `eps`-order `k + 1`; uses pairs
/// `1..=k+1`.
pub fn assemble_omega(
    fam: &OvalFamily,
    w: &Form1Planar<BivarPoly>,
    pairs: &[GVPair],
    k: usize,
) -> Result<FormEps<BivarPoly>, GodbillonError> {
    let order = k + 1;
    if pairs.len() < order {
        return Err(GodbillonError::InsufficientPairs {
            needed: order,
            available: pairs.len(),
        });
    }
    let g: Vec<BivarPoly> = std::iter::once(BivarPoly::one())
        .chain(pairs[..order].iter().map(|p| p.g.clone()))
        .collect();
    let r: Vec<BivarPoly> = pairs[..order].iter().map(|p| p.r.clone()).collect();
    Ok(assemble_chains(fam, w, &g, &r, order))
}

/// `Omega ^ d~Omega` restricted to weight `<= k + 1`.
pub fn integrability_defect(
    omega: &FormEps<BivarPoly>,
    k: usize,
) -> Result<FormEps<BivarPoly>, GodbillonError> {
    if omega.order() < k + 1 {
        return Err(GodbillonError::OrderTooLow {
            needed: k + 1,
            available: omega.order(),
        });
    }
    let om = omega.with_order(k + 1);
    Ok(om.wedge(&om.d_total()).truncate_weight(WeightBound(k + 1)))
}

/// `G_0..G_k` and `R_1..R_{k+1}` found by the weight-by-weight solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GvSolution {
    pub g: Vec<BivarPoly>,
    pub r: Vec<BivarPoly>,
}

impl GvSolution {
    pub fn order(&self) -> usize {
        self.g.len() - 1
    }

    /// Pairs `1..=k+1`; the undetermined `G_{k+1}` is zero.
    pub fn pairs(&self) -> Vec<GVPair> {
        (1..=self.r.len())
            .map(|i| GVPair {
                g: self.g.get(i).cloned().unwrap_or_else(BivarPoly::zero),
                r: self.r[i - 1].clone(),
            })
            .collect()
    }

    pub fn omega(&self, fam: &OvalFamily, w: &Form1Planar<BivarPoly>) -> FormEps<BivarPoly> {
        assemble_chains(fam, w, &self.g, &self.r, self.r.len())
    }
}

type Key = (usize, usize, Monomial);

fn flatten(f: &FormEps<BivarPoly>) -> BTreeMap<Key, Rational> {
    let mut out = BTreeMap::new();
    for (b, s) in f.terms() {
        for (i, c) in s.coeffs().iter().enumerate() {
            for (m, v) in c.terms() {
                out.insert((b.index(), i, *m), v.clone());
            }
        }
    }
    out
}

fn monomials_up_to(deg: u32, with_constant: bool) -> Vec<Monomial> {
    (0..=deg)
        .rev()
        .filter(|&d| with_constant || d > 0)
        .flat_map(Monomial::of_degree)
        .collect()
}

/// Solves `Omega ^ d~Omega = 0` through weight `k + 1` one weight at a time,
/// without using the relative-exactness decomposition.
///
/// At order `j` the unknowns are `R_{j+1}` and `G_j`; the weight `j + 1`
/// part of the defect is affine in them. An inconsistent system means no
/// choice works at order `j`, reported as the obstruction index `j + 1`.
pub fn solve_gv(
    fam: &OvalFamily,
    w: &Form1Planar<BivarPoly>,
    k: usize,
) -> Result<GvSolution, GodbillonError> {
    let n = w.degree().unwrap_or(0);
    let df = fam.differential();
    let mut g = vec![BivarPoly::one()];
    let mut r: Vec<BivarPoly> = Vec::new();
    for j in 0..=k {
        let order = j + 1;
        let known = assemble_chains(fam, w, &g, &r, order);
        let low = known.truncate_weight(WeightBound(1));
        let d_low = low.d_total();
        let constant = flatten(&known.wedge(&known.d_total()).weight_part(j + 1));

        let g_deg = (j as u32 * n).saturating_sub(j as u32);
        let r_deg = g_deg + n + 1;
        let r_cols = monomials_up_to(r_deg, false);
        let g_cols = if j == 0 {
            Vec::new()
        } else {
            monomials_up_to(g_deg, true)
        };
        let unknowns: Vec<FormEps<BivarPoly>> = r_cols
            .iter()
            .map(|m| {
                let mono = BivarPoly::monomial(m.x, m.y);
                FormEps::zero(order)
                    .with_component(Basis::DEPS, EpsSeries::monomial(mono, j, order))
            })
            .chain(g_cols.iter().map(|m| {
                let mono = BivarPoly::monomial(m.x, m.y);
                let part = |a: &BivarPoly, b: &BivarPoly| {
                    EpsSeries::monomial(a * &mono, j, order)
                        .add(&EpsSeries::monomial(b * &mono, j + 1, order))
                        .expect("same order")
                };
                FormEps::one_form(part(&df.p, &w.p), part(&df.q, &w.q), EpsSeries::zero(order))
            }))
            .collect();
        let columns: Vec<BTreeMap<Key, Rational>> = unknowns
            .par_iter()
            .map(|u| {
                flatten(
                    &low.wedge(&u.d_total())
                        .add(&u.wedge(&d_low))
                        .weight_part(j + 1),
                )
            })
            .collect();

        let mut rows: BTreeMap<Key, usize> = BTreeMap::new();
        for key in constant
            .keys()
            .chain(columns.iter().flat_map(BTreeMap::keys))
        {
            let next = rows.len();
            rows.entry(*key).or_insert(next);
        }
        let ncols = columns.len();
        let mut a = vec![vec![Rational::zero(); ncols]; rows.len()];
        let mut b = vec![Rational::zero(); rows.len()];
        for (c, col) in columns.iter().enumerate() {
            for (key, v) in col {
                a[rows[key]][c] = v.clone();
            }
        }
        for (key, v) in &constant {
            b[rows[key]] = -v.clone();
        }
        let LinearOutcome::Solved(v) = solve(&a, &b, ncols) else {
            return Err(GodbillonError::ObstructionAtOrder { order: j + 1 });
        };
        let mut r_next = BivarPoly::zero();
        for (m, c) in r_cols.iter().zip(&v) {
            r_next.add_term(*m, c.clone());
        }
        r.push(r_next);
        if j > 0 {
            let mut g_next = BivarPoly::zero();
            for (m, c) in g_cols.iter().zip(&v[r_cols.len()..]) {
                g_next.add_term(*m, c.clone());
            }
            g.push(g_next);
        }
        let omega = assemble_chains(fam, w, &g, &r, order);
        if !integrability_defect(&omega, j)?.is_zero() {
            return Err(GodbillonError::Internal(format!(
                "solved order {j} but the defect does not vanish"
            )));
        }
    }
    Ok(GvSolution { g, r })
}

/// Polynomial first integral `F + sum (-1)^(i+1) eps^i r_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FirstIntegral {
    pub series: EpsSeries<BivarPoly>,
}

impl FirstIntegral {
    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// `d~F_eps`; exact through weight `order`.
    pub fn differential(&self) -> FormEps<BivarPoly> {
        FormEps::function(self.series.clone()).d_total()
    }
}

pub fn first_integral(
    fam: &OvalFamily,
    seq: &FrancoiseSequence,
    k: usize,
) -> Result<FirstIntegral, GodbillonError> {
    first_integral_from_pairs(fam, seq.pairs(), k)
}

fn first_integral_from_pairs(
    fam: &OvalFamily,
    pairs: &[FrancoisePair],
    k: usize,
) -> Result<FirstIntegral, GodbillonError> {
    if pairs.len() < k {
        return Err(GodbillonError::InsufficientPairs {
            needed: k,
            available: pairs.len(),
        });
    }
    let coeffs = std::iter::once(fam.hamiltonian().clone())
        .chain(
            pairs[..k]
                .iter()
                .enumerate()
                .map(|(j, p)| p.r().scale(&q(sign(j), 1))),
        )
        .collect();
    Ok(FirstIntegral {
        series: EpsSeries::from_coeffs(coeffs, k),
    })
}

/// Reads `G_0..G_upto` and `R_1..R_upto` from a form
/// `R deps + G (dF + eps w)`.
fn read_shape(
    fam: &OvalFamily,
    w: &Form1Planar<BivarPoly>,
    form: &FormEps<BivarPoly>,
    upto: usize,
) -> Result<(Vec<BivarPoly>, Vec<BivarPoly>), GodbillonError> {
    let df = fam.differential();
    let mut g: Vec<BivarPoly> = Vec::new();
    for i in 0..=upto {
        let planar = form.planar_coeff(i);
        let prev = |c: &BivarPoly| match i {
            0 => BivarPoly::zero(),
            _ => &g[i - 1] * c,
        };
        let gi = (&planar.p - &prev(&w.p))
            .exact_div(&df.p)
            .ok_or(GodbillonError::NotDeformationShape { order: i })?;
        if planar.q != &gi * &df.q + prev(&w.q) {
            return Err(GodbillonError::NotDeformationShape { order: i });
        }
        g.push(gi);
    }
    let deps = form.component(Basis::DEPS);
    let r = (1..=upto).map(|i| deps.coeff(i - 1).clone()).collect();
    for b in [
        Basis::ONE,
        Basis::DXDY,
        Basis::DXDEPS,
        Basis::DYDEPS,
        Basis::TOP,
    ] {
        if !form.component(b).is_zero() {
            return Err(GodbillonError::NotDeformationShape { order: 0 });
        }
    }
    Ok((g, r))
}

/// GV pairs `1..=k+1` read from a form of deformation shape, typically
/// `d~F_eps` stored to order `k + 1`.
pub fn read_gv_pairs(
    fam: &OvalFamily,
    w: &Form1Planar<BivarPoly>,
    form: &FormEps<BivarPoly>,
    k: usize,
) -> Result<Vec<GVPair>, GodbillonError> {
    if form.order() < k + 1 {
        return Err(GodbillonError::OrderTooLow {
            needed: k + 1,
            available: form.order(),
        });
    }
    let (g, r) = read_shape(fam, w, form, k + 1)?;
    if !g[0].is_one_poly() {
        return Err(GodbillonError::NotDeformationShape { order: 0 });
    }
    Ok(g.into_iter()
        .skip(1)
        .zip(r)
        .map(|(g, r)| GVPair { g, r })
        .collect())
}

/// Solves `Omega = N d~F_eps` weight by weight with `n_0 = 1`, then checks
/// the identity through weight `k + 1`.
pub fn integrating_factor(
    omega: &FormEps<BivarPoly>,
    fint: &FirstIntegral,
    k: usize,
) -> Result<EpsSeries<BivarPoly>, GodbillonError> {
    let order = k + 1;
    for have in [omega.order(), fint.order()] {
        if have < order {
            return Err(GodbillonError::OrderTooLow {
                needed: order,
                available: have,
            });
        }
    }
    if !integrability_defect(omega, k)?.is_zero() {
        return Err(GodbillonError::NotIntegrable { weight: order });
    }
    let om = omega.with_order(order);
    let dfe = FirstIntegral {
        series: fint.series.truncate(order),
    }
    .differential();
    let d0 = dfe.weight_part(0);
    let fx = d0.component(Basis::DX).coeff(0).clone();
    let mut n: Vec<BivarPoly> = Vec::new();
    for j in 0..=order {
        let mut residual = om.weight_part(j);
        for (a, na) in n.iter().enumerate() {
            let shifted = EpsSeries::monomial(na.clone(), a, order);
            residual = residual.sub(&dfe.weight_part(j - a).mul_series(&shifted));
        }
        let nj = residual
            .component(Basis::DX)
            .coeff(j)
            .exact_div(&fx)
            .ok_or(GodbillonError::NoFactorExists { weight: j })?;
        if residual != d0.mul_series(&EpsSeries::monomial(nj.clone(), j, order)) {
            return Err(GodbillonError::NoFactorExists { weight: j });
        }
        if j == 0 && !nj.is_one_poly() {
            return Err(GodbillonError::NoFactorExists { weight: 0 });
        }
        n.push(nj);
    }
    let factor = EpsSeries::from_coeffs(n, order);
    if !om
        .sub(&dfe.mul_series(&factor))
        .is_zero_mod_weight(WeightBound(order))
    {
        return Err(GodbillonError::Internal(
            "integrating factor check failed".into(),
        ));
    }
    Ok(factor)
}

/// Integrating factor, first integral and Françoise pairs recovered from an
/// integrable `Omega`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub factor: EpsSeries<BivarPoly>,
    pub first_integral: FirstIntegral,
    pub pairs: Vec<FrancoisePair>,
}

/// Normalizes an integrable `Omega` (order `k`) to `N d~F_eps`, building the
/// Françoise pairs of `F_eps` along the way.
pub fn factor_omega(
    fam: &OvalFamily,
    w: &Form1Planar<BivarPoly>,
    omega: &FormEps<BivarPoly>,
    k: usize,
) -> Result<Factorization, GodbillonError> {
    let order = k + 1;
    if !integrability_defect(omega, k)?.is_zero() {
        return Err(GodbillonError::NotIntegrable { weight: order });
    }
    let om = omega.with_order(order);
    let df = fam.differential();
    let mut factor = EpsSeries::one(order);
    let mut pairs: Vec<FrancoisePair> = Vec::new();
    for j in 1..=order {
        let inv = factor
            .invert()
            .map_err(|e| GodbillonError::Internal(e.to_string()))?;
        let theta = om.mul_series(&inv);
        let (g, r) = read_shape(fam, w, &theta, j)?;
        let rj = r[j - 1].scale(&q(sign(j - 1), j as i64));
        let prev = pairs.last().map_or_else(BivarPoly::one, |p| p.g().clone());
        let target = w.scale(&prev);
        let rest = target.sub(&Form1Planar::exact(&rj));
        let gj = rest
            .p
            .exact_div(&df.p)
            .ok_or(GodbillonError::NotIntegrable { weight: j })?;
        let pair = FrancoisePair::verified(&target, gj, rj, fam)?;
        let step = &g[j] + &pair.g().scale(&q(sign(j - 1), 1));
        factor = factor.mul_unchecked(&EpsSeries::from_coeffs(
            std::iter::once(BivarPoly::one())
                .chain(std::iter::repeat_n(BivarPoly::zero(), j - 1))
                .chain(std::iter::once(step))
                .collect(),
            order,
        ));
        pairs.push(pair);
    }
    let fint = first_integral_from_pairs(fam, &pairs, order)?;
    let check = om.sub(&fint.differential().mul_series(&factor));
    if !check.is_zero_mod_weight(WeightBound(order)) {
        return Err(GodbillonError::Internal(
            "factorization check failed".into(),
        ));
    }
    Ok(Factorization {
        factor,
        first_integral: fint,
        pairs,
    })
}

/// Forms `eta_0..eta_m` with `sum eps^i/i! eta_i = dF_eps / (d F_eps/d eps)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GVClassicalSequence {
    /// Factorial-normalized forms `eta_i`.
    pub eta: Vec<Form1Planar<RationalFunction>>,
    /// Raw Taylor coefficients `eta_i / i!`.
    pub taylor: Vec<Form1Planar<RationalFunction>>,
    /// `dF`, then `r_1^(i-1) eta_i` for `i >= 1`.
    pub rescaled: Vec<Form1Planar<RationalFunction>>,
}

impl GVClassicalSequence {
    /// `d eta_n - sum_{a+b=n} C(n,a) eta_a ^ eta_(b+1)` for `n < m`; all zero
    /// when `d eps + sum eps^i/i! eta_i` is integrable.
    pub fn relation_residuals(&self) -> Vec<Form2Planar<RationalFunction>> {
        let m = self.eta.len() - 1;
        (0..m)
            .map(|n| {
                let mut h = d_planar(&self.eta[n]).h;
                let mut binom: i64 = 1;
                for a in 0..=n {
                    let wedge = self.eta[a].wedge(&self.eta[n - a + 1]).h;
                    h = h.sub(&wedge.mul(&RationalFunction::from_rational(q(binom, 1))));
                    binom = binom * (n - a) as i64 / (a + 1) as i64;
                }
                Form2Planar { h }
            })
            .collect()
    }
}

/// Classical GV forms of the first integral; needs `fint` to order `m + 1`.
pub fn classical_gv_forms(
    fint: &FirstIntegral,
    m: usize,
) -> Result<GVClassicalSequence, GodbillonError> {
    if fint.order() < m + 1 {
        return Err(GodbillonError::OrderTooLow {
            needed: m + 1,
            available: fint.order(),
        });
    }
    let s = fint.series.truncate(m + 1);
    let r1 = s.coeff(1).clone();
    if r1.is_zero() {
        return Err(GodbillonError::DegenerateNormalization);
    }
    let inv = s
        .derivative()
        .truncate(m)
        .invert_lifted()
        .map_err(|_| GodbillonError::DegenerateNormalization)?;
    let px = s.partial(Var::X).truncate(m).lift().mul_unchecked(&inv);
    let py = s.partial(Var::Y).truncate(m).lift().mul_unchecked(&inv);
    let taylor: Vec<_> = (0..=m)
        .map(|i| Form1Planar::new(px.coeff(i).clone(), py.coeff(i).clone()))
        .collect();
    let mut fact = 1i64;
    let mut eta = Vec::new();
    for (i, t) in taylor.iter().enumerate() {
        if i > 0 {
            fact *= i as i64;
        }
        eta.push(t.scale(&RationalFunction::from_rational(q(fact, 1))));
    }
    let r1f = RationalFunction::from_poly(r1);
    let df = Form1Planar::new(s.coeff(0).partial(Var::X), s.coeff(0).partial(Var::Y)).lift();
    let mut rescaled = vec![df];
    let mut power = RationalFunction::one();
    for e in eta.iter().skip(1) {
        rescaled.push(e.scale(&power));
        power = power.mul(&r1f);
    }
    Ok(GVClassicalSequence {
        eta,
        taylor,
        rescaled,
    })
}

/// `theta = -dG/G`, kept as the exact logarithmic derivative of `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogDerivative {
    pub g: EpsSeries<BivarPoly>,
}

impl LogDerivative {
    fn dg(&self) -> FormEps<BivarPoly> {
        FormEps::function(self.g.clone()).d_planar()
    }

    /// Expansion of `-dG/G` in `eps`.
    pub fn series(&self) -> FormEps<BivarPoly> {
        let inv = self.g.invert().expect("G starts with 1");
        self.dg().mul_series(&inv).neg()
    }

    /// `d theta = (dG ^ dG)/G^2 - d(dG)/G`; both numerators vanish
    /// identically.
    pub fn is_closed(&self) -> bool {
        let dg = self.dg();
        dg.d_planar().is_zero() && dg.wedge(&dg).is_zero()
    }
}

/// Evidence for the length-two relation `d eta = theta ^ eta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthTwoWitness {
    pub theta: LogDerivative,
    /// `G (dF + eps w)`.
    pub product: FormEps<BivarPoly>,
    /// `G d eta + dG ^ eta = 0` through order `k`.
    pub product_closed: bool,
    /// `G eta = dF_eps` for the first integral of the same pairs.
    pub matches_first_integral: bool,
    /// `d eta = theta ^ eta` for the series expansion of `theta`.
    pub theta_relation: bool,
    pub theta_closed: bool,
}

impl LengthTwoWitness {
    pub fn holds(&self) -> bool {
        self.product_closed
            && self.matches_first_integral
            && self.theta_relation
            && self.theta_closed
    }
}

pub fn length_two_witness(
    fam: &OvalFamily,
    seq: &FrancoiseSequence,
    k: usize,
) -> Result<LengthTwoWitness, GodbillonError> {
    let fint = first_integral(fam, seq, k)?;
    let coeffs = (0..=k)
        .map(|i| seq.g(i).expect("pairs checked").scale(&q(sign(i), 1)))
        .collect();
    let g = EpsSeries::from_coeffs(coeffs, k);
    if !g.coeff(0).is_one_poly() {
        return Err(GodbillonError::Internal("G does not start with 1".into()));
    }
    let eta = FormEps::from_planar(&fam.differential(), 0, k).add(&FormEps::from_planar(
        seq.omega(),
        1,
        k,
    ));
    let theta = LogDerivative { g: g.clone() };
    let gf = FormEps::function(g.clone());
    let d_eta = eta.d_planar();
    let closed = gf.wedge(&d_eta).add(&gf.d_planar().wedge(&eta)).is_zero();
    let product = eta.mul_series(&g);
    let dfe = FormEps::function(fint.series.clone()).d_planar();
    let relation = d_eta.sub(&theta.series().wedge(&eta)).is_zero();
    Ok(LengthTwoWitness {
        theta_closed: theta.is_closed(),
        theta,
        matches_first_integral: product == dfe,
        product,
        product_closed: closed,
        theta_relation: relation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::francoise::melnikov_sequence;

    fn p(s: &str) -> BivarPoly {
        s.parse().unwrap()
    }

    fn example_one(order: usize) -> (OvalFamily, Form1Planar<BivarPoly>, FrancoiseSequence) {
        let fam = OvalFamily::circle();
        let w = Form1Planar::new(p("y^2"), BivarPoly::zero());
        let seq = melnikov_sequence(&fam, &w, order).unwrap().sequence;
        (fam, w, seq)
    }

    #[test]
    fn sign_rule() {
        let (_, _, seq) = example_one(2);
        let gv = gv_pairs_from_francoise(&seq);
        assert_eq!(
            gv[0],
            GVPair {
                g: p("x"),
                r: p("x y^2 + 2/3 x^3")
            }
        );
        assert_eq!(
            gv[1],
            GVPair {
                g: p("1/2 x^2"),
                r: p("x^2 y^2 + 1/2 x^4")
            }
        );
    }

    #[test]
    fn defect_examples() {
        let fam = OvalFamily::circle();
        let zero = Form1Planar::new(BivarPoly::zero(), BivarPoly::zero());
        let trivial = vec![
            GVPair {
                g: BivarPoly::zero(),
                r: BivarPoly::zero()
            };
            4
        ];
        for k in 0..3 {
            let om = assemble_omega(&fam, &zero, &trivial, k).unwrap();
            assert_eq!(om, FormEps::from_planar(&fam.differential(), 0, k + 1));
            assert!(integrability_defect(&om, k).unwrap().is_zero());
        }

        let ydx = Form1Planar::new(p("y"), BivarPoly::zero());
        let om = assemble_omega(&fam, &ydx, &trivial, 0).unwrap();
        // weight-0 part is dF whatever w is
        assert_eq!(
            om.truncate_weight(WeightBound(0)),
            FormEps::from_planar(&fam.differential(), 0, 1)
        );
        let defect = integrability_defect(&om, 0).unwrap();
        let expected = FormEps::from_planar(&fam.differential(), 0, 1)
            .wedge(&FormEps::basis(Basis::DEPS, 1))
            .wedge(&FormEps::from_planar(&ydx, 0, 1));
        assert_eq!(defect, expected);
        assert!(!defect.is_zero());

        let (fam, w, seq) = example_one(5);
        let om = assemble_omega(&fam, &w, &gv_pairs_from_francoise(&seq), 4).unwrap();
        assert!(integrability_defect(&om, 4).unwrap().is_zero());
        assert!(matches!(
            integrability_defect(&om, 5),
            Err(GodbillonError::OrderTooLow { .. })
        ));
    }

    #[test]
    fn first_integral_examples() {
        let (fam, _, seq) = example_one(2);
        assert_eq!(
            first_integral(&fam, &seq, 0).unwrap().series.coeff(0),
            &p("x^2 + y^2")
        );
        let f = first_integral(&fam, &seq, 2).unwrap();
        assert_eq!(f.series.coeff(1), &p("x y^2 + 2/3 x^3"));
        assert_eq!(f.series.coeff(2), &p("1/2 x^2 y^2 + 1/4 x^4"));
        assert!(matches!(
            first_integral(&fam, &seq, 3),
            Err(GodbillonError::InsufficientPairs { .. })
        ));
    }

    #[test]
    fn classical_forms_of_unit_shift() {
        let fint = FirstIntegral {
            series: EpsSeries::from_coeffs(vec![p("x^2 + y^2"), p("1")], 3),
        };
        let gv = classical_gv_forms(&fint, 2).unwrap();
        assert_eq!(gv.eta[0], Form1Planar::new(p("2x"), p("2y")).lift());
        assert!(gv.eta[1].is_zero() && gv.eta[2].is_zero());
        let degenerate = FirstIntegral {
            series: EpsSeries::from_coeffs(vec![p("x^2 + y^2")], 3),
        };
        assert_eq!(
            classical_gv_forms(&degenerate, 2),
            Err(GodbillonError::DegenerateNormalization)
        );
    }

    #[test]
    fn trivial_witness() {
        let fam = OvalFamily::circle();
        let exact = Form1Planar::exact(&p("x y"));
        let seq = melnikov_sequence(&fam, &exact, 3).unwrap().sequence;
        let wit = length_two_witness(&fam, &seq, 3).unwrap();
        assert!(wit.theta.series().is_zero());
        assert!(wit.holds());
    }
}
