//! Relative exactness `w = g dF + dr` and the iterated Melnikov functions.
//!
//! The decomposition solves one homogeneous degree block at a time. For a
//! block of `w` of degree `m` the unknowns are the coefficients of `r` in
//! degree `m + 1` followed by those of `g` in degree `m - 1`, both in
//! descending graded-lex order; rows are the `dx` equations and then the `dy`
//! equations. Free columns are set to zero, which fixes a canonical
//! representative (`r` never has a constant term).

use num_traits::Zero;
use thiserror::Error;

use crate::abelian::{period_of_form, AbelianError, OvalFamily, PeriodPoly};
use crate::algebra::linsolve::{solve, LinearOutcome};
use crate::algebra::{q, BivarPoly, Monomial, Rational};
use crate::exterior::{d_planar, Form1Planar};

pub const DEFAULT_MAX_ORDER: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FrancoiseError {
    #[error("form is not relatively exact: period {witness}")]
    NoSolution { witness: PeriodPoly },
    #[error(transparent)]
    Family(#[from] AbelianError),
    #[error("max_order must be at least 1")]
    InvalidMaxOrder,
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// `(g, r)` with `g_prev * w = g dF + dr`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrancoisePair {
    g: BivarPoly,
    r: BivarPoly,
}

impl FrancoisePair {
    /// Builds a pair after checking `target = g dF + dr` and that `r` has
    /// no constant term.
    pub fn verified(
        target: &Form1Planar<BivarPoly>,
        g: BivarPoly,
        r: BivarPoly,
        fam: &OvalFamily,
    ) -> Result<Self, FrancoiseError> {
        if !r.constant_term().is_zero() {
            return Err(FrancoiseError::Internal("r has a constant term".into()));
        }
        let rebuilt = fam.differential().scale(&g).add(&Form1Planar::exact(&r));
        if &rebuilt != target {
            return Err(FrancoiseError::Internal(format!(
                "resubstitution failed for g = {g}, r = {r}"
            )));
        }
        Ok(FrancoisePair { g, r })
    }

    pub fn g(&self) -> &BivarPoly {
        &self.g
    }

    pub fn r(&self) -> &BivarPoly {
        &self.r
    }
}

fn block_system(
    w: &Form1Planar<BivarPoly>,
    m: u32,
) -> (
    Vec<Vec<Rational>>,
    Vec<Rational>,
    Vec<Monomial>,
    Vec<Monomial>,
) {
    let r_cols: Vec<Monomial> = Monomial::of_degree(m + 1).collect();
    let g_cols: Vec<Monomial> = if m == 0 {
        Vec::new()
    } else {
        Monomial::of_degree(m - 1).collect()
    };
    let ncols = r_cols.len() + g_cols.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for dx_row in [true, false] {
        for mono in Monomial::of_degree(m) {
            let mut row = vec![Rational::zero(); ncols];
            let (ra, rb) = (mono.x, mono.y);
            for (j, c) in r_cols.iter().enumerate() {
                if dx_row && c.x == ra + 1 && c.y == rb {
                    row[j] = q(i64::from(ra) + 1, 1);
                }
                if !dx_row && c.x == ra && c.y == rb + 1 {
                    row[j] = q(i64::from(rb) + 1, 1);
                }
            }
            for (j, c) in g_cols.iter().enumerate() {
                let hit = if dx_row {
                    ra >= 1 && c.x == ra - 1 && c.y == rb
                } else {
                    rb >= 1 && c.x == ra && c.y == rb - 1
                };
                if hit {
                    row[r_cols.len() + j] = q(2, 1);
                }
            }
            a.push(row);
            b.push(if dx_row {
                w.p.coeff(&mono)
            } else {
                w.q.coeff(&mono)
            });
        }
    }
    (a, b, r_cols, g_cols)
}

/// Solves `w = g dF + dr` exactly, or reports the nonzero period that
/// obstructs it.
pub fn decompose(
    w: &Form1Planar<BivarPoly>,
    fam: &OvalFamily,
) -> Result<FrancoisePair, FrancoiseError> {
    let period = period_of_form(w, fam);
    let Some(top) = w.degree() else {
        return FrancoisePair::verified(w, BivarPoly::zero(), BivarPoly::zero(), fam);
    };
    let mut g = BivarPoly::zero();
    let mut r = BivarPoly::zero();
    for m in 0..=top {
        let block = Form1Planar::new(w.p.homogeneous_part(m), w.q.homogeneous_part(m));
        if block.is_zero() {
            continue;
        }
        let (a, b, r_cols, g_cols) = block_system(&block, m);
        let ncols = r_cols.len() + g_cols.len();
        match solve(&a, &b, ncols) {
            LinearOutcome::Inconsistent => {
                if period.is_zero() {
                    return Err(FrancoiseError::Internal(format!(
                        "degree {m} block unsolvable although the period vanishes"
                    )));
                }
                return Err(FrancoiseError::NoSolution { witness: period });
            }
            LinearOutcome::Solved(v) => {
                for (mono, c) in r_cols.iter().zip(&v) {
                    r.add_term(*mono, c.clone());
                }
                for (mono, c) in g_cols.iter().zip(&v[r_cols.len()..]) {
                    g.add_term(*mono, c.clone());
                }
            }
        }
    }
    if !period.is_zero() {
        return Err(FrancoiseError::Internal(
            "solved a form with nonzero period".into(),
        ));
    }
    FrancoisePair::verified(w, g, r, fam)
}

/// Either the length of a sequence or the marker that it was not reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SequenceLength {
    Finite(usize),
    ExceedsMax,
}

/// Pairs `1..=m` for a fixed form, with `g_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrancoiseSequence {
    omega: Form1Planar<BivarPoly>,
    pairs: Vec<FrancoisePair>,
}

impl FrancoiseSequence {
    pub fn omega(&self) -> &Form1Planar<BivarPoly> {
        &self.omega
    }

    pub fn pairs(&self) -> &[FrancoisePair] {
        &self.pairs
    }

    /// `g_i`, with `g_0 = 1`. `None` past the computed range.
    pub fn g(&self, i: usize) -> Option<BivarPoly> {
        if i == 0 {
            return Some(BivarPoly::one());
        }
        self.pairs.get(i - 1).map(|p| p.g.clone())
    }

    /// `r_i` for `i >= 1`.
    pub fn r(&self, i: usize) -> Option<&BivarPoly> {
        i.checked_sub(1)
            .and_then(|j| self.pairs.get(j))
            .map(|p| &p.r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MelnikovResult {
    pub melnikov: Vec<PeriodPoly>,
    pub first_nonzero: Option<usize>,
    pub sequence: FrancoiseSequence,
}

/// Computes `M_1, M_2, ...` until the first nonzero one or `max_order`,
/// extending the pair sequence while they vanish.
pub fn melnikov_sequence(
    fam: &OvalFamily,
    w: &Form1Planar<BivarPoly>,
    max_order: usize,
) -> Result<MelnikovResult, FrancoiseError> {
    if max_order == 0 {
        return Err(FrancoiseError::InvalidMaxOrder);
    }
    let mut seq = FrancoiseSequence {
        omega: w.clone(),
        pairs: Vec::new(),
    };
    let mut melnikov = Vec::new();
    let mut first_nonzero = None;
    for k in 0..max_order {
        let gk = seq.g(k).expect("pairs computed up to k");
        let target = w.scale(&gk);
        let sign = if k % 2 == 0 { q(-1, 1) } else { q(1, 1) };
        let m = period_of_form(&target, fam).scale(&sign);
        let vanishes = m.is_zero();
        melnikov.push(m);
        if !vanishes {
            first_nonzero = Some(k + 1);
            break;
        }
        let pair = decompose(&target, fam).map_err(|e| match e {
            FrancoiseError::NoSolution { .. } => {
                FrancoiseError::Internal("vanishing period but no decomposition".into())
            }
            other => other,
        })?;
        seq.pairs.push(pair);
    }
    Ok(MelnikovResult {
        melnikov,
        first_nonzero,
        sequence: seq,
    })
}

/// Smallest `l` with `g_{l+1} = 0`, looking at most `max_order` pairs deep.
pub fn sequence_length(seq: &FrancoiseSequence, max_order: usize) -> SequenceLength {
    seq.pairs
        .iter()
        .take(max_order)
        .position(|p| p.g.is_zero())
        .map_or(SequenceLength::ExceedsMax, SequenceLength::Finite)
}

/// `d(g_{i-1} w) - dg_i ^ dF` for each computed pair; all zero for a valid
/// sequence.
pub fn gelfand_leray_residuals(seq: &FrancoiseSequence, fam: &OvalFamily) -> Vec<BivarPoly> {
    let df = fam.differential();
    (1..=seq.pairs.len())
        .map(|i| {
            let lhs = d_planar(&seq.omega.scale(&seq.g(i - 1).expect("in range")));
            let dg = Form1Planar::exact(&seq.g(i).expect("in range"));
            lhs.h - dg.wedge(&df).h
        })
        .collect()
}
