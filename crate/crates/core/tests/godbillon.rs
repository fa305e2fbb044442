use foliate::abelian::OvalFamily;
use foliate::algebra::{q, BivarPoly, Coeff, EpsSeries, RationalFunction, Var};
use foliate::exterior::{d_planar, Basis, Form1Planar, FormEps, WeightBound};
use foliate::francoise::{melnikov_sequence, FrancoiseSequence};
use foliate::godbillon::{
    assemble_omega, classical_gv_forms, factor_omega, first_integral, francoise_from_gv,
    gv_pairs_from_francoise, integrability_defect, integrating_factor, length_two_witness,
    read_gv_pairs, solve_gv, FirstIntegral, GodbillonError,
};
use rand::{Rng, SeedableRng};

fn p(s: &str) -> BivarPoly {
    s.parse().unwrap()
}

fn fixture(name: &str) -> Form1Planar<BivarPoly> {
    let fam = OvalFamily::circle();
    match name {
        "example1" => Form1Planar::new(p("y^2"), BivarPoly::zero()),
        "example2" => fam.differential().scale(&p("x")),
        _ => unreachable!(),
    }
}

fn sequence(w: &Form1Planar<BivarPoly>, n: usize) -> FrancoiseSequence {
    let res = melnikov_sequence(&OvalFamily::circle(), w, n).unwrap();
    assert!(res.first_nonzero.is_none());
    res.sequence
}

#[test]
fn round_trip_through_godbillon_vey() {
    let fam = OvalFamily::circle();
    for name in ["example1", "example2"] {
        let w = fixture(name);
        let seq = sequence(&w, 7);
        let gv = gv_pairs_from_francoise(&seq);
        assert_eq!(francoise_from_gv(&fam, &w, &gv).unwrap(), seq.pairs());
        for k in 0..=6 {
            let omega = assemble_omega(&fam, &w, &gv, k).unwrap();
            assert!(
                integrability_defect(&omega, k).unwrap().is_zero(),
                "{name} k={k}"
            );
            let fint = first_integral(&fam, &seq, k + 1).unwrap();
            let n = integrating_factor(&omega, &fint, k).unwrap();
            assert_eq!(n, EpsSeries::one(k + 1), "{name} k={k}");
            let dfe = fint.differential();
            assert!(omega
                .sub(&dfe.mul_series(&n))
                .is_zero_mod_weight(WeightBound(k + 1)));
            let read = read_gv_pairs(&fam, &w, &dfe, k).unwrap();
            let back = francoise_from_gv(&fam, &w, &read).unwrap();
            assert_eq!(back.as_slice(), &seq.pairs()[..=k]);
        }
    }
}

#[test]
fn example_one_first_integral_matches_closed_form() {
    // eps-expansion of exp(eps x) (y^2 + 2x/eps - 2/eps^2), computed with a
    // CAS; the eps^-2 term carries no (x, y) dependence and is dropped
    let expansion = [
        "x^2 + y^2",
        "2/3 x^3 + x y^2",
        "1/4 x^4 + 1/2 x^2 y^2",
        "1/15 x^5 + 1/6 x^3 y^2",
        "1/72 x^6 + 1/24 x^4 y^2",
        "1/420 x^7 + 1/120 x^5 y^2",
        "1/2880 x^8 + 1/720 x^6 y^2",
    ];
    let fam = OvalFamily::circle();
    let seq = sequence(&fixture("example1"), 6);
    let fint = first_integral(&fam, &seq, 6).unwrap();
    for (i, e) in expansion.iter().enumerate() {
        let c = fint.series.coeff(i);
        let e = p(e);
        assert_eq!(c.partial(Var::X), e.partial(Var::X), "eps^{i}");
        assert_eq!(c.partial(Var::Y), e.partial(Var::Y), "eps^{i}");
    }
}

#[test]
fn solver_matches_melnikov_on_fixtures() {
    let fam = OvalFamily::circle();
    for name in ["example1", "example2"] {
        let w = fixture(name);
        let k = 5;
        let sol = solve_gv(&fam, &w, k).unwrap();
        let omega = sol.omega(&fam, &w);
        assert!(integrability_defect(&omega, k).unwrap().is_zero());
        assert_eq!(assemble_omega(&fam, &w, &sol.pairs(), k).unwrap(), omega);
        // the constructive normalization recovers valid pairs and a factor
        let fac = factor_omega(&fam, &w, &omega, k).unwrap();
        assert_eq!(fac.factor.coeff(0), &BivarPoly::one());
        assert_eq!(fac.pairs.len(), k + 1);
        let n = integrating_factor(&omega, &fac.first_integral, k).unwrap();
        assert_eq!(n, fac.factor);
    }
}

#[test]
fn obstruction_order_equals_first_nonzero_melnikov() {
    let fam = OvalFamily::circle();
    let ydx = Form1Planar::new(p("y"), BivarPoly::zero());
    assert_eq!(
        solve_gv(&fam, &ydx, 0),
        Err(GodbillonError::ObstructionAtOrder { order: 1 })
    );
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..60 {
        // relatively exact forms plus a small random remainder reach deeper
        // first-nonzero orders
        let g = random_poly(&mut rng, 1);
        let r = random_poly(&mut rng, 3);
        let mut w = fam.differential().scale(&g).add(&Form1Planar::exact(&r));
        if rng.gen_bool(0.7) {
            w = w.add(&Form1Planar::new(
                random_poly(&mut rng, 2),
                random_poly(&mut rng, 2),
            ));
        }
        let k = 2;
        let mel = melnikov_sequence(&fam, &w, k + 1).unwrap();
        match (mel.first_nonzero, solve_gv(&fam, &w, k)) {
            (None, Ok(sol)) => {
                assert!(integrability_defect(&sol.omega(&fam, &w), k)
                    .unwrap()
                    .is_zero());
                seen.insert(0);
            }
            (Some(mu), Err(GodbillonError::ObstructionAtOrder { order })) => {
                assert_eq!(order, mu, "w = {w}");
                seen.insert(mu);
            }
            (m, s) => panic!("w = {w}: melnikov {m:?}, solver {s:?}"),
        }
    }
    assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
}

fn random_poly(rng: &mut impl Rng, max_deg: u32) -> BivarPoly {
    let n = rng.gen_range(0..4);
    BivarPoly::from_terms((0..n).map(|_| {
        let d = rng.gen_range(0..=max_deg);
        let a = rng.gen_range(0..=d);
        (q(rng.gen_range(-3..=3), rng.gen_range(1..=2)), a, d - a)
    }))
}

#[test]
fn classical_relations_for_example_one() {
    let fam = OvalFamily::circle();
    let seq = sequence(&fixture("example1"), 4);
    let fint = first_integral(&fam, &seq, 4).unwrap();
    let gv = classical_gv_forms(&fint, 3).unwrap();
    let r1 = RationalFunction::from_poly(p("x y^2 + 2/3 x^3"));
    let eta0 = fam.differential().lift().scale(&r1.recip().unwrap());
    assert_eq!(gv.eta[0], eta0);
    for (n, res) in gv.relation_residuals().iter().enumerate() {
        assert!(res.is_zero(), "relation {n}: {res}");
    }
    // explicitly: d eta_0 = eta_0 ^ eta_1, d eta_1 = eta_0 ^ eta_2
    assert_eq!(d_planar(&gv.eta[0]), gv.eta[0].wedge(&gv.eta[1]));
    assert_eq!(d_planar(&gv.eta[1]), gv.eta[0].wedge(&gv.eta[2]));
    // eta_1 = d r_1 / r_1 - 2 r_2 dF / r_1^2 with r_2 the eps^2 coefficient
    let r2 = RationalFunction::from_poly(fint.series.coeff(2).clone());
    let dr1 = Form1Planar::exact(&p("x y^2 + 2/3 x^3")).lift();
    let expected = dr1.scale(&r1.recip().unwrap()).sub(
        &fam.differential().lift().scale(
            &r2.mul(&r1.mul(&r1).recip().unwrap())
                .mul(&RationalFunction::from_rational(q(2, 1))),
        ),
    );
    assert_eq!(gv.eta[1], expected);
    for (i, t) in gv.taylor.iter().enumerate() {
        let fact: i64 = (1..=i as i64).product();
        assert_eq!(
            t.scale(&RationalFunction::from_rational(q(fact, 1))),
            gv.eta[i]
        );
    }
}

#[test]
fn example_two_has_degenerate_classical_normalization() {
    let fam = OvalFamily::circle();
    let seq = sequence(&fixture("example2"), 3);
    let fint = first_integral(&fam, &seq, 3).unwrap();
    assert_eq!(fint.series, EpsSeries::constant(p("x^2 + y^2"), 3));
    assert_eq!(
        classical_gv_forms(&fint, 2),
        Err(GodbillonError::DegenerateNormalization)
    );
    let _: Option<FirstIntegral> = None;
}

#[test]
fn length_two_witness_for_fixtures() {
    let fam = OvalFamily::circle();
    let k = 5;
    let seq = sequence(&fixture("example2"), k);
    let wit = length_two_witness(&fam, &seq, k).unwrap();
    assert!(wit.holds());
    assert_eq!(wit.product, FormEps::from_planar(&fam.differential(), 0, k));
    // theta = eps dx / (1 + eps x) = eps dx - eps^2 x dx + ...
    let theta = wit.theta.series();
    let expected: Vec<BivarPoly> = (0..=k)
        .map(|i| match i {
            0 => BivarPoly::zero(),
            _ => BivarPoly::from_terms([(q(if i % 2 == 1 { 1 } else { -1 }, 1), i as u32 - 1, 0)]),
        })
        .collect();
    assert_eq!(
        theta.component(Basis::DX),
        &EpsSeries::from_coeffs(expected, k)
    );
    assert!(theta.component(Basis::DY).is_zero());

    let seq = sequence(&fixture("example1"), 4);
    let wit = length_two_witness(&fam, &seq, 4).unwrap();
    assert!(wit.product_closed && wit.matches_first_integral && wit.theta_relation);
    assert!(wit.theta_closed);
}

#[test]
fn rescaled_classical_forms_are_reported_as_is() {
    let fam = OvalFamily::circle();
    let seq = sequence(&fixture("example1"), 3);
    let fint = first_integral(&fam, &seq, 3).unwrap();
    let gv = classical_gv_forms(&fint, 2).unwrap();
    assert_eq!(gv.rescaled[0], fam.differential().lift());
    assert_eq!(gv.rescaled[1], gv.eta[1]);
    let r1 = RationalFunction::from_poly(p("x y^2 + 2/3 x^3"));
    assert_eq!(gv.rescaled[2], gv.eta[2].scale(&r1));
    // the rescaled list does not satisfy the first classical relation for dF:
    // d(dF) = 0 while dF ^ rescaled_1 = dF ^ d r_1 / r_1 does not vanish
    assert!(d_planar(&gv.rescaled[0]).is_zero());
    assert!(!gv.rescaled[0].wedge(&gv.rescaled[1]).is_zero());
}
