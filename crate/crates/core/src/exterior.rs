//! Differential forms on the `(x, y)` plane and on `(x, y, eps)` space.
//!
//! Forms on `(x, y, eps)` carry the weight grading `w(x) = w(y) = w(dx) =
//! w(dy) = 0`, `w(eps) = w(deps) = 1`. Both `d` and the total differential
//! preserve weight, so a form stored to `eps`-order `K` is exact through
//! weight `K`; every "modulo" check in this crate is a weight check.

use std::fmt;

use crate::algebra::{BivarPoly, Coeff, EpsSeries, RationalFunction, Var};

/// Planar 1-form `p dx + q dy`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form1Planar<C> {
    pub p: C,
    pub q: C,
}

/// Planar 2-form `h dx^dy`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form2Planar<C> {
    pub h: C,
}

impl<C: Coeff> Form1Planar<C> {
    pub fn new(p: C, q: C) -> Self {
        Form1Planar { p, q }
    }

    pub fn zero() -> Self {
        Form1Planar::new(C::zero(), C::zero())
    }

    /// Exterior derivative of a function.
    pub fn exact(f: &C) -> Self {
        Form1Planar::new(f.partial(Var::X), f.partial(Var::Y))
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Form1Planar::new(self.p.add(&o.p), self.q.add(&o.q))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Form1Planar::new(self.p.sub(&o.p), self.q.sub(&o.q))
    }

    pub fn scale(&self, c: &C) -> Self {
        Form1Planar::new(self.p.mul(c), self.q.mul(c))
    }

    pub fn wedge(&self, o: &Self) -> Form2Planar<C> {
        Form2Planar {
            h: self.p.mul(&o.q).sub(&self.q.mul(&o.p)),
        }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Form1Planar<D> {
        Form1Planar::new(f(&self.p), f(&self.q))
    }
}

impl Form1Planar<BivarPoly> {
    pub fn lift(&self) -> Form1Planar<RationalFunction> {
        self.map(|c| RationalFunction::from_poly(c.clone()))
    }

    pub fn degree(&self) -> Option<u32> {
        match (self.p.degree(), self.q.degree()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }
}

impl<C: Coeff> Form2Planar<C> {
    pub fn zero() -> Self {
        Form2Planar { h: C::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.h.is_zero()
    }
}

/// `d(p dx + q dy) = (q_x - p_y) dx^dy`.
pub fn d_planar<C: Coeff>(u: &Form1Planar<C>) -> Form2Planar<C> {
    Form2Planar {
        h: u.q.partial(Var::X).sub(&u.p.partial(Var::Y)),
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for Form1Planar<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) dx + ({}) dy", self.p, self.q)
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for Form2Planar<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) dx^dy", self.h)
    }
}

/// Basis covector set, stored as a bitmask in the canonical order
/// `dx < dy < deps`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Basis(u8);

impl Basis {
    pub const ONE: Basis = Basis(0);
    pub const DX: Basis = Basis(1);
    pub const DY: Basis = Basis(2);
    pub const DEPS: Basis = Basis(4);
    pub const DXDY: Basis = Basis(3);
    pub const DXDEPS: Basis = Basis(5);
    pub const DYDEPS: Basis = Basis(6);
    pub const TOP: Basis = Basis(7);

    pub const ALL: [Basis; 8] = [
        Basis::ONE,
        Basis::DX,
        Basis::DY,
        Basis::DEPS,
        Basis::DXDY,
        Basis::DXDEPS,
        Basis::DYDEPS,
        Basis::TOP,
    ];

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn has_deps(self) -> bool {
        self.0 & 4 != 0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Canonical product with its sign, or `None` when a covector repeats.
    pub fn wedge(self, other: Basis) -> Option<(Basis, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // count pairs (i in self, j in other) with i > j
        let mut inversions = 0;
        for i in 0..3 {
            if self.0 & (1 << i) != 0 {
                inversions += (other.0 & ((1 << i) - 1)).count_ones();
            }
        }
        Some((Basis(self.0 | other.0), inversions % 2 == 1))
    }

    fn name(self) -> &'static str {
        [
            "1",
            "dx",
            "dy",
            "dx^dy",
            "deps",
            "dx^deps",
            "dy^deps",
            "dx^dy^deps",
        ][self.0 as usize]
    }
}

/// Upper bound `k` for "modulo weight" checks: terms of weight `> k` are
/// discarded, terms of weight `<= k` are tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightBound(pub usize);

/// Weight of `eps^i` times the basis covector set `b`.
pub fn term_weight(i: usize, b: Basis) -> usize {
    i + usize::from(b.has_deps())
}

/// Differential form on `(x, y, eps)`-space with every component an
/// [`EpsSeries`] of the same order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormEps<C> {
    comps: [EpsSeries<C>; 8],
}

impl<C: Coeff> FormEps<C> {
    pub fn zero(order: usize) -> Self {
        FormEps {
            comps: std::array::from_fn(|_| EpsSeries::zero(order)),
        }
    }

    pub fn order(&self) -> usize {
        self.comps[0].order()
    }

    /// Forms are exact for every term of weight at most this value.
    pub fn exact_through_weight(&self) -> usize {
        self.order()
    }

    pub fn component(&self, b: Basis) -> &EpsSeries<C> {
        &self.comps[b.index()]
    }

    pub fn with_component(mut self, b: Basis, s: EpsSeries<C>) -> Self {
        assert_eq!(s.order(), self.order(), "component order mismatch");
        self.comps[b.index()] = s;
        self
    }

    /// A function (0-form).
    pub fn function(s: EpsSeries<C>) -> Self {
        let k = s.order();
        FormEps::zero(k).with_component(Basis::ONE, s)
    }

    /// `a dx + b dy + c deps`.
    pub fn one_form(dx: EpsSeries<C>, dy: EpsSeries<C>, deps: EpsSeries<C>) -> Self {
        let k = dx.order();
        FormEps::zero(k)
            .with_component(Basis::DX, dx)
            .with_component(Basis::DY, dy)
            .with_component(Basis::DEPS, deps)
    }

    /// `eps^power * w` for a planar 1-form `w`.
    pub fn from_planar(w: &Form1Planar<C>, power: usize, order: usize) -> Self {
        FormEps::one_form(
            EpsSeries::monomial(w.p.clone(), power, order),
            EpsSeries::monomial(w.q.clone(), power, order),
            EpsSeries::zero(order),
        )
    }

    /// Single basis covector with coefficient 1.
    pub fn basis(b: Basis, order: usize) -> Self {
        FormEps::zero(order).with_component(b, EpsSeries::one(order))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(EpsSeries::is_zero)
    }

    /// Nonzero components as `(basis, series)`.
    pub fn terms(&self) -> impl Iterator<Item = (Basis, &EpsSeries<C>)> {
        Basis::ALL
            .into_iter()
            .map(move |b| (b, &self.comps[b.index()]))
            .filter(|(_, s)| !s.is_zero())
    }

    fn zip(&self, o: &Self, f: impl Fn(&EpsSeries<C>, &EpsSeries<C>) -> EpsSeries<C>) -> Self {
        assert_eq!(self.order(), o.order(), "form order mismatch");
        FormEps {
            comps: std::array::from_fn(|i| f(&self.comps[i], &o.comps[i])),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b).expect("orders checked"))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b).expect("orders checked"))
    }

    pub fn neg(&self) -> Self {
        FormEps {
            comps: std::array::from_fn(|i| self.comps[i].neg()),
        }
    }

    /// Multiplication by a function of `(x, y, eps)`.
    pub fn mul_series(&self, s: &EpsSeries<C>) -> Self {
        assert_eq!(self.order(), s.order(), "form order mismatch");
        FormEps {
            comps: std::array::from_fn(|i| self.comps[i].mul_unchecked(s)),
        }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> FormEps<D> {
        FormEps {
            comps: std::array::from_fn(|i| self.comps[i].map(&f)),
        }
    }

    /// Graded-antisymmetric product, truncated at the shared order. Products
    /// past degree 3 vanish.
    pub fn wedge(&self, o: &Self) -> Self {
        assert_eq!(self.order(), o.order(), "form order mismatch");
        let mut out = FormEps::zero(self.order());
        for (ba, sa) in self.terms() {
            for (bb, sb) in o.terms() {
                let Some((b, negative)) = ba.wedge(bb) else {
                    continue;
                };
                let prod = sa.mul_unchecked(sb);
                let i = b.index();
                out.comps[i] = if negative {
                    out.comps[i].sub(&prod)
                } else {
                    out.comps[i].add(&prod)
                }
                .expect("orders checked");
            }
        }
        out
    }

    fn apply_d(&self, with_eps: bool) -> Self {
        let mut out = FormEps::zero(self.order());
        for (b, s) in self.terms() {
            let mut parts = vec![
                (Basis::DX, s.partial(Var::X)),
                (Basis::DY, s.partial(Var::Y)),
            ];
            if with_eps {
                parts.push((Basis::DEPS, s.derivative()));
            }
            for (cov, ds) in parts {
                let Some((target, negative)) = cov.wedge(b) else {
                    continue;
                };
                let i = target.index();
                out.comps[i] = if negative {
                    out.comps[i].sub(&ds)
                } else {
                    out.comps[i].add(&ds)
                }
                .expect("orders checked");
            }
        }
        out
    }

    /// Total differential in `(x, y, eps)`.
    ///
    /// Weight-preserving. The coefficient of `eps^K deps` would need
    /// `c_{K+1}` and is left zero; it has weight `K + 1`, outside the exact
    /// range.
    pub fn d_total(&self) -> Self {
        self.apply_d(true)
    }

    /// Exterior derivative in `x, y` only, with `eps` as a parameter.
    pub fn d_planar(&self) -> Self {
        self.apply_d(false)
    }

    /// Drops every term of weight `> w`.
    pub fn truncate_weight(&self, w: WeightBound) -> Self {
        let mut out = self.clone();
        for b in Basis::ALL {
            let s = &mut out.comps[b.index()];
            for i in 0..=s.order() {
                if term_weight(i, b) > w.0 {
                    s.set_coeff(i, C::zero());
                }
            }
        }
        out
    }

    /// `true` iff every term of weight `<= w` vanishes.
    pub fn is_zero_mod_weight(&self, w: WeightBound) -> bool {
        self.truncate_weight(w).is_zero()
    }

    /// Terms of exactly weight `w`.
    pub fn weight_part(&self, w: usize) -> Self {
        let mut out = FormEps::zero(self.order());
        for b in Basis::ALL {
            for i in 0..=self.order() {
                if term_weight(i, b) == w {
                    out.comps[b.index()].set_coeff(i, self.comps[b.index()].coeff(i).clone());
                }
            }
        }
        out
    }

    /// Smallest weight carrying a nonzero term.
    pub fn lowest_weight(&self) -> Option<usize> {
        self.terms()
            .flat_map(|(b, s)| {
                s.coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(move |(i, _)| term_weight(i, b))
            })
            .min()
    }

    /// Re-expands at another order, padding with zeros or truncating.
    pub fn with_order(&self, order: usize) -> Self {
        FormEps {
            comps: std::array::from_fn(|i| self.comps[i].truncate(order)),
        }
    }

    /// Planar 1-form sitting at `eps^i`, ignoring `deps` terms.
    pub fn planar_coeff(&self, i: usize) -> Form1Planar<C> {
        Form1Planar::new(
            self.component(Basis::DX).coeff(i).clone(),
            self.component(Basis::DY).coeff(i).clone(),
        )
    }

    /// Form degree of a homogeneous form; `None` when zero or mixed.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms().map(|(b, _)| b.degree());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for FormEps<C> {
    /// `(p) dx + (q) dy + (r) deps`, with series coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (b, s) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if b == Basis::ONE {
                write!(f, "({s})")?;
            } else {
                write!(f, "({s}) {}", b.name())?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use crate::algebra::{q, BivarPoly};
    use proptest::prelude::*;

    const K: usize = 3;

    fn poly() -> impl Strategy<Value = BivarPoly> {
        prop::collection::vec((-3i64..=3, 0u32..3, 0u32..3), 0..3)
            .prop_map(|ts| BivarPoly::from_terms(ts.into_iter().map(|(n, a, b)| (q(n, 1), a, b))))
    }

    fn series() -> impl Strategy<Value = EpsSeries<BivarPoly>> {
        prop::collection::vec(poly(), K + 1).prop_map(|cs| EpsSeries::from_coeffs(cs, K))
    }

    fn form() -> impl Strategy<Value = FormEps<BivarPoly>> {
        prop::collection::vec(series(), 8).prop_map(|ss| {
            let mut f = FormEps::zero(K);
            for (b, s) in Basis::ALL.into_iter().zip(ss) {
                f = f.with_component(b, s);
            }
            f
        })
    }

    fn homogeneous(deg: u32) -> impl Strategy<Value = FormEps<BivarPoly>> {
        form().prop_map(move |f| {
            let mut out = FormEps::zero(K);
            for b in Basis::ALL {
                if b.degree() == deg {
                    out = out.with_component(b, f.component(b).clone());
                }
            }
            out
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn d_squared_vanishes(u in form()) {
            let dd = u.d_total().d_total();
            prop_assert!(dd.is_zero_mod_weight(WeightBound(K)));
        }

        #[test]
        fn wedge_graded_commutative(da in 0u32..=3, db in 0u32..=3, seed in form(), other in form()) {
            let pick = |f: &FormEps<BivarPoly>, d: u32| {
                let mut out = FormEps::zero(K);
                for b in Basis::ALL {
                    if b.degree() == d {
                        out = out.with_component(b, f.component(b).clone());
                    }
                }
                out
            };
            let u = pick(&seed, da);
            let v = pick(&other, db);
            let uv = u.wedge(&v);
            let vu = v.wedge(&u);
            if (da * db) % 2 == 0 {
                prop_assert_eq!(uv, vu);
            } else {
                prop_assert_eq!(uv, vu.neg());
            }
        }

        #[test]
        fn truncation_idempotent_and_monotone(u in form(), k in 0usize..=K) {
            let t = u.truncate_weight(WeightBound(k));
            prop_assert_eq!(t.truncate_weight(WeightBound(k)), t.clone());
            if k > 0 {
                let lower = u.truncate_weight(WeightBound(k - 1));
                prop_assert_eq!(t.truncate_weight(WeightBound(k - 1)), lower);
            }
        }

        #[test]
        fn planar_part_of_total_d(u in homogeneous(1)) {
            let planar_only = {
                let mut f = FormEps::zero(K);
                for b in [Basis::DX, Basis::DY] {
                    f = f.with_component(b, u.component(b).clone());
                }
                f
            };
            let total = planar_only.d_total();
            for i in 0..=K {
                let w = planar_only.planar_coeff(i);
                prop_assert_eq!(total.component(Basis::DXDY).coeff(i), &d_planar(&w).h);
            }
        }
    }

    #[test]
    fn homogeneous_degree_detects_mixing() {
        let a = FormEps::<BivarPoly>::basis(Basis::DX, 1);
        assert_eq!(a.homogeneous_degree(), Some(1));
        let b = a.add(&FormEps::basis(Basis::ONE, 1));
        assert_eq!(b.homogeneous_degree(), None);
        let _ = homogeneous(2);
    }
}
