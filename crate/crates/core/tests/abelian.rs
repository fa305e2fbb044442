use foliate::abelian::{monomial_period, period_of_form, Differential, OvalFamily};
use foliate::algebra::{q, BivarPoly, Monomial};
use foliate::exterior::Form1Planar;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

/// Adaptive Simpson on `[a, b]`.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (depth < 44 && (left + right - whole).abs() <= 15.0 * tol) {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Angular integral over the unit circle.
fn numeric_period(a: u32, b: u32, basis: Differential) -> f64 {
    let f = move |th: f64| {
        let (c, s) = (th.cos(), th.sin());
        let base = c.powi(a as i32) * s.powi(b as i32);
        match basis {
            Differential::Dx => -base * s,
            Differential::Dy => base * c,
        }
    };
    // split into quarters so the symmetric cancellations are resolved
    let quarter = std::f64::consts::FRAC_PI_2;
    (0..4)
        .map(|i| simpson(&f, i as f64 * quarter, (i + 1) as f64 * quarter, 1e-14))
        .sum()
}

#[test]
fn monomial_periods_match_quadrature() {
    for a in 0..=9 {
        for b in 0..=9 {
            for basis in [Differential::Dx, Differential::Dy] {
                let exact = monomial_period(a, b, basis).eval_f64(1.0);
                let numeric = numeric_period(a, b, basis);
                if exact == 0.0 {
                    assert!(numeric.abs() < 1e-12, "({a},{b},{basis:?}): {numeric}");
                } else {
                    let rel = ((exact - numeric) / exact).abs();
                    assert!(rel < 1e-10, "({a},{b},{basis:?}): {exact} vs {numeric}");
                }
            }
        }
    }
}

fn random_poly(rng: &mut impl Rng, max_deg: u32) -> BivarPoly {
    let n = rng.gen_range(1..8);
    BivarPoly::from_terms((0..n).map(|_| {
        let d = rng.gen_range(0..=max_deg);
        let a = rng.gen_range(0..=d);
        (q(rng.gen_range(-9..=9), rng.gen_range(1..=4)), a, d - a)
    }))
}

#[test]
fn exact_forms_have_zero_period() {
    let fam = OvalFamily::circle();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let h = random_poly(&mut rng, 8);
        assert!(
            period_of_form(&Form1Planar::exact(&h), &fam).is_zero(),
            "H = {h}"
        );
    }
}

#[test]
fn multiples_of_df_have_zero_period() {
    let fam = OvalFamily::circle();
    let df = fam.differential();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let g = random_poly(&mut rng, 6);
        assert!(period_of_form(&df.scale(&g), &fam).is_zero(), "g = {g}");
    }
}

fn poly() -> impl Strategy<Value = BivarPoly> {
    prop::collection::vec((-6i64..=6, 1i64..=3, 0u32..5, 0u32..5), 0..6)
        .prop_map(|ts| BivarPoly::from_terms(ts.into_iter().map(|(n, d, a, b)| (q(n, d), a, b))))
}

proptest! {
    #[test]
    fn period_is_linear(up in poly(), uq in poly(), vp in poly(), vq in poly(), al in -5i64..=5, be in 1i64..=5) {
        let fam = OvalFamily::circle();
        let u = Form1Planar::new(up, uq);
        let v = Form1Planar::new(vp, vq);
        let (a, b) = (q(al, 1), q(1, be));
        let combo = u.scale(&BivarPoly::constant(a.clone())).add(&v.scale(&BivarPoly::constant(b.clone())));
        let lhs = period_of_form(&combo, &fam);
        let rhs = period_of_form(&u, &fam).scale(&a).add(&period_of_form(&v, &fam).scale(&b));
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn green_theorem_on_area_forms() {
    let fam = OvalFamily::circle();
    // (x dy - y dx)/2 has period equal to the enclosed area pi t
    let w = Form1Planar::new(
        BivarPoly::term(q(-1, 2), Monomial { x: 0, y: 1 }),
        BivarPoly::term(q(1, 2), Monomial { x: 1, y: 0 }),
    );
    assert_eq!(period_of_form(&w, &fam).to_string(), "π·t");
}
