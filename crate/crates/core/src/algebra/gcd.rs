//! Polynomial gcd over `Q[x, y]`, computed recursively as `Q[x][y]` with a
//! subresultant pseudo-remainder sequence in `y` and univariate Euclid in `x`
//! for the contents.

use num_traits::{One, Zero};

use super::{BivarPoly, Monomial, Rational};

/// Dense univariate polynomial over `Q`, little-endian, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct UPoly(Vec<Rational>);

impl UPoly {
    fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        UPoly(c)
    }

    fn zero() -> Self {
        UPoly(Vec::new())
    }

    fn one() -> Self {
        UPoly(vec![Rational::one()])
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn lead(&self) -> &Rational {
        self.0.last().expect("nonzero polynomial")
    }

    fn scale(&self, c: &Rational) -> Self {
        UPoly::new(self.0.iter().map(|v| v * c).collect())
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![Rational::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in other.0.iter().enumerate() {
            out[i] -= b;
        }
        UPoly::new(out)
    }

    fn pow(&self, n: usize) -> Self {
        let mut acc = UPoly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.0.clone();
        if rem.len() < d.0.len() {
            return (UPoly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - d.0.len() + 1];
        let lead_inv = d.lead().recip();
        for k in (0..quot.len()).rev() {
            let c = &rem[k + d.0.len() - 1] * &lead_inv;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    rem[k + j] -= &c * dj;
                }
            }
            quot[k] = c;
        }
        (UPoly::new(quot), UPoly::new(rem))
    }

    fn exact_div(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact univariate division");
        q
    }

    fn monic(&self) -> Self {
        if self.is_zero() {
            return UPoly::zero();
        }
        self.scale(&self.lead().recip())
    }

    fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

/// Element of `Q[x][y]`: index is the power of `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct RPoly(Vec<UPoly>);

impl RPoly {
    fn new(mut c: Vec<UPoly>) -> Self {
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        RPoly(c)
    }

    fn from_bivar(p: &BivarPoly) -> Self {
        let ydeg = p.degree_in(super::Var::Y).unwrap_or(0) as usize;
        let xdeg = p.degree_in(super::Var::X).unwrap_or(0) as usize;
        let mut rows = vec![vec![Rational::zero(); xdeg + 1]; ydeg + 1];
        for (m, c) in p.terms() {
            rows[m.y as usize][m.x as usize] = c.clone();
        }
        RPoly::new(rows.into_iter().map(UPoly::new).collect())
    }

    fn to_bivar(&self) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (b, row) in self.0.iter().enumerate() {
            for (a, c) in row.0.iter().enumerate() {
                out.add_term(Monomial::new(a as u32, b as u32), c.clone());
            }
        }
        out
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &UPoly {
        self.0.last().expect("nonzero polynomial")
    }

    fn content(&self) -> UPoly {
        self.0.iter().fold(UPoly::zero(), |acc, c| {
            if acc.is_zero() {
                c.monic()
            } else {
                acc.gcd(c)
            }
        })
    }

    fn map_exact_div(&self, d: &UPoly) -> Self {
        RPoly::new(self.0.iter().map(|c| c.exact_div(d)).collect())
    }

    fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.map_exact_div(&self.content())
    }

    fn scale(&self, c: &UPoly) -> Self {
        RPoly::new(self.0.iter().map(|v| v.mul(c)).collect())
    }

    /// `lc(d)^(deg self - deg d + 1) * self mod d` in `y`.
    fn pseudo_rem(&self, d: &Self) -> Self {
        if self.is_zero() || self.degree() < d.degree() {
            return self.clone();
        }
        let dl = d.lead();
        let mut e = self.degree() - d.degree() + 1;
        let mut r = self.clone();
        while !r.is_zero() && r.degree() >= d.degree() {
            let shift = r.degree() - d.degree();
            let lc = r.lead().clone();
            let mut next: Vec<UPoly> = r.0.iter().map(|c| c.mul(dl)).collect();
            for (j, dj) in d.0.iter().enumerate() {
                next[shift + j] = next[shift + j].sub(&dj.mul(&lc));
            }
            r = RPoly::new(next);
            e -= 1;
        }
        r.scale(&dl.pow(e))
    }
}

/// Greatest common divisor in `Q[x, y]`, normalized monic in graded-lex.
pub fn poly_gcd(a: &BivarPoly, b: &BivarPoly) -> BivarPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let (mut pa, mut pb) = (RPoly::from_bivar(a), RPoly::from_bivar(b));
    if pa.degree() < pb.degree() {
        std::mem::swap(&mut pa, &mut pb);
    }
    let content = pa.content().gcd(&pb.content());
    let g = subresultant_gcd(pa.primitive_part(), pb.primitive_part());
    g.scale(&content).to_bivar().monic()
}

/// Subresultant PRS on primitive inputs with `deg a >= deg b`; returns the
/// primitive gcd.
fn subresultant_gcd(mut a: RPoly, mut b: RPoly) -> RPoly {
    let one = RPoly(vec![UPoly::one()]);
    if b.degree() == 0 {
        return one;
    }
    let mut g = UPoly::one();
    let mut h = UPoly::one();
    loop {
        let delta = a.degree() - b.degree();
        let r = a.pseudo_rem(&b);
        if r.is_zero() {
            return b.primitive_part();
        }
        if r.degree() == 0 {
            return one;
        }
        a = b;
        let div = g.mul(&h.pow(delta));
        b = r.map_exact_div(&div);
        g = a.lead().clone();
        // h <- g^delta / h^(delta - 1)
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).exact_div(&h.pow(delta - 1))
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> BivarPoly {
        s.parse().unwrap()
    }

    #[test]
    fn univariate_gcd() {
        let a = UPoly::new(vec![
            Rational::from_integer((-1).into()),
            Rational::zero(),
            Rational::one(),
        ]);
        let b = UPoly::new(vec![Rational::one(), Rational::one()]);
        assert_eq!(a.gcd(&b), b);
    }

    #[test]
    fn bivariate_common_factor() {
        let f = p("x y + 2x^2 - 3");
        let a = &f * &p("x - y^2");
        let b = &f * &p("x^3 + y + 1");
        assert_eq!(poly_gcd(&a, &b), f.monic());
    }

    #[test]
    fn coprime_and_content() {
        assert_eq!(poly_gcd(&p("x + y"), &p("x - y")), BivarPoly::one());
        // content in x only
        let a = p("x^2 y + x^2");
        let b = p("x y^3 + x");
        assert_eq!(poly_gcd(&a, &b), p("x y + x"));
        assert_eq!(poly_gcd(&p("3x"), &BivarPoly::zero()), p("x"));
    }

    #[test]
    fn pseudo_rem_identity() {
        let a = RPoly::from_bivar(&p("x y^3 + y^2 - x^2 y + 5"));
        let b = RPoly::from_bivar(&p("2x y + x^2"));
        let r = a.pseudo_rem(&b);
        // lc(b)^(3-1+1) a - r is divisible by b
        let lc = b.lead().clone().pow(3);
        let lhs = a.scale(&lc).to_bivar() - r.to_bivar();
        assert!(lhs.exact_div(&b.to_bivar()).is_some());
    }
}
