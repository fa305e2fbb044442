//! Fraction-free (Bareiss) elimination for exact linear systems.
//!
//! Rows are scaled to integers, eliminated with exact integer division, and
//! back-substituted over `Q`. Columns are visited in the given order; a column
//! without a pivot is a free variable and is set to zero, so the returned
//! solution is the one the reduced echelon form selects for that order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearOutcome {
    Solved(Vec<Rational>),
    Inconsistent,
}

/// Solves `A v = b` for a dense rational `A` (`rows x cols`).
pub fn solve(a: &[Vec<Rational>], b: &[Rational], cols: usize) -> LinearOutcome {
    assert_eq!(a.len(), b.len(), "row count mismatch");
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| integer_row(row, rhs, cols))
        .collect();
    let rows = m.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (head, tail) = m.split_at_mut(r + 1);
        let piv_row = &head[r];
        let pv = piv_row[c].clone();
        for row in tail.iter_mut() {
            let f = row[c].clone();
            for j in c + 1..=cols {
                let v = &pv * &row[j] - &f * &piv_row[j];
                let (qv, rem) = v.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss step must divide exactly");
                row[j] = qv;
            }
            row[c] = BigInt::zero();
        }
        prev = pv;
        pivots.push((r, c));
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return LinearOutcome::Inconsistent;
    }
    let mut x = vec![Rational::zero(); cols];
    for &(row, col) in pivots.iter().rev() {
        let mut acc = Rational::from_integer(m[row][cols].clone());
        for j in col + 1..cols {
            if !m[row][j].is_zero() && !x[j].is_zero() {
                acc -= Rational::from_integer(m[row][j].clone()) * &x[j];
            }
        }
        x[col] = acc / Rational::from_integer(m[row][col].clone());
    }
    LinearOutcome::Solved(x)
}

fn integer_row(row: &[Rational], rhs: &Rational, cols: usize) -> Vec<BigInt> {
    debug_assert_eq!(row.len(), cols);
    let lcm = row
        .iter()
        .chain(std::iter::once(rhs))
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    row.iter()
        .chain(std::iter::once(rhs))
        .map(|v| (v * Rational::from_integer(lcm.clone())).to_integer())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| q(v, 1)).collect())
            .collect()
    }

    #[test]
    fn unique_solution() {
        let a = mat(&[&[2, 1], &[1, 3]]);
        let b = vec![q(3, 1), q(5, 1)];
        assert_eq!(
            solve(&a, &b, 2),
            LinearOutcome::Solved(vec![q(4, 5), q(7, 5)])
        );
    }

    #[test]
    fn free_columns_are_zero() {
        // x + y = 2: y is free
        let a = mat(&[&[1, 1]]);
        assert_eq!(
            solve(&a, &[q(2, 1)], 2),
            LinearOutcome::Solved(vec![q(2, 1), q(0, 1)])
        );
        // a zero first column makes x free
        let a = mat(&[&[0, 1], &[0, 2]]);
        assert_eq!(
            solve(&a, &[q(1, 1), q(2, 1)], 2),
            LinearOutcome::Solved(vec![q(0, 1), q(1, 1)])
        );
    }

    #[test]
    fn detects_inconsistency() {
        let a = mat(&[&[1, 1], &[2, 2]]);
        assert_eq!(
            solve(&a, &[q(1, 1), q(3, 1)], 2),
            LinearOutcome::Inconsistent
        );
    }

    #[test]
    fn rational_entries() {
        let a = vec![vec![q(1, 2), q(1, 3)], vec![q(1, 4), q(-1, 6)]];
        let b = vec![q(1, 1), q(0, 1)];
        let LinearOutcome::Solved(x) = solve(&a, &b, 2) else {
            panic!("expected solution")
        };
        assert_eq!(&a[0][0] * &x[0] + &a[0][1] * &x[1], q(1, 1));
        assert_eq!(&a[1][0] * &x[0] + &a[1][1] * &x[1], q(0, 1));
    }
}
