use crate::{cmd_gv, cmd_oracle, load_spec, run_melnikov, OracleRequest, ProblemSpec};

/// Fixtures compiled into the binary, by name.
pub const FIXTURES: &[(&str, &str)] = &[
    ("example1", include_str!("../fixtures/example1.json")),
    ("example2", include_str!("../fixtures/example2.json")),
    (
        "example3-oracle",
        include_str!("../fixtures/example3-oracle.json"),
    ),
    ("nonzero-m1", include_str!("../fixtures/nonzero-m1.json")),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureOutcome {
    pub name: String,
    pub failures: Vec<String>,
}

impl FixtureOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every pipeline a fixture applies to and compares with its `expect`
/// block.
pub fn verify_fixture(name: &str, text: &str) -> FixtureOutcome {
    let mut failures = Vec::new();
    if let Err(e) = load_spec(text).and_then(|s| check(&s, &mut failures)) {
        failures.push(e.to_string());
    }
    FixtureOutcome {
        name: name.to_string(),
        failures,
    }
}

/// The built-in fixtures followed by `extra` `(name, text)` documents.
pub fn verify_all(extra: &[(String, String)]) -> Vec<FixtureOutcome> {
    FIXTURES
        .iter()
        .map(|(n, t)| verify_fixture(n, t))
        .chain(extra.iter().map(|(n, t)| verify_fixture(n, t)))
        .collect()
}

fn check(spec: &ProblemSpec, failures: &mut Vec<String>) -> Result<(), crate::CliError> {
    let problem = spec.validate()?;
    let expect = spec.expect.clone().unwrap_or_default();
    let mut fail = |msg: String| failures.push(msg);

    if problem.omega_poly.is_some() {
        let res = run_melnikov(&problem, problem.max_order)?;
        if let Some(want) = expect.first_nonzero {
            if res.first_nonzero != want {
                fail(format!(
                    "first_nonzero {:?}, expected {want:?}",
                    res.first_nonzero
                ));
            }
        }
        if let Some(want) = &expect.melnikov_first {
            let got = res.first_nonzero.map(|i| res.melnikov[i - 1].to_string());
            if got.as_ref() != Some(want) {
                fail(format!("first nonzero function {got:?}, expected {want}"));
            }
        }
        if let Some(want) = &expect.g {
            for (i, g) in want.iter().enumerate() {
                let got = res.sequence.g(i + 1).map(|p| p.to_string());
                if got.as_ref() != Some(g) {
                    fail(format!("g_{} = {got:?}, expected {g}", i + 1));
                }
            }
        }
    }

    if let Some(k) = expect.gv_k {
        let report = cmd_gv(spec, k)?;
        let gv = report.gv.expect("gv report present");
        let got = gv.obstruction.as_ref().map(|o| o.order);
        if let Some(want) = expect.obstruction {
            if got != want {
                fail(format!("obstruction {got:?}, expected {want:?}"));
            }
        }
        if got.is_none() {
            if gv.defect_zero.iter().any(|z| !z) {
                fail(format!("defects {:?}", gv.defect_zero));
            }
            if !gv.theta.as_ref().is_some_and(|t| t.holds) {
                fail("length-two witness fails".into());
            }
        }
    }

    if !problem.t.is_empty() {
        let report = cmd_oracle(spec, &OracleRequest::default())?;
        let oracle = report.oracle.expect("oracle report present");
        if let Some(bound) = expect.max_abs_delta {
            if !(oracle.max_abs_delta < bound) {
                fail(format!(
                    "max |delta| {:e} not below {bound:e}",
                    oracle.max_abs_delta
                ));
            }
        }
        for row in &oracle.estimates {
            if row.agrees == Some(false) {
                fail(format!(
                    "M_1 estimate {} disagrees with {:?} at t = {}",
                    row.m1, row.symbolic_m1, row.t
                ));
            }
            if let Some(want) = expect.m1_estimate {
                if !((row.m1 - want).abs() <= 1e-6 * want.abs()) {
                    fail(format!(
                        "M_1 estimate {} at t = {}, expected {want}",
                        row.m1, row.t
                    ));
                }
            }
        }
    }
    Ok(())
}
