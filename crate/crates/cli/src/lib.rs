//! Problem files, the command pipelines behind the `foliate` binary, and the
//! shipped fixtures.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use foliate::abelian::AbelianError;
use foliate::algebra::BivarPoly;
use foliate::exterior::Form1Planar;
use foliate::francoise::{
    gelfand_leray_residuals, melnikov_sequence, sequence_length, FrancoiseError, MelnikovResult,
    SequenceLength,
};
use foliate::godbillon::{
    assemble_omega, classical_gv_forms, first_integral, gv_pairs_from_francoise,
    integrability_defect, integrating_factor, length_two_witness, read_gv_pairs, solve_gv, GVPair,
    GodbillonError,
};
use foliate::oracle::{
    melnikov_estimate, sweep, write_csv, FitOptions, HolonomyConfig, NumericForm, OracleError,
};

mod report;
mod spec;
mod verify;

pub use report::{
    ClassicalReport, EstimateRow, GvReport, LengthText, MelnikovReport, Obstruction, OracleReport,
    PairText, RunReport, SampleRow, ThetaReport,
};
pub use spec::{
    load_spec, Expectation, OmegaSpec, OracleSpec, Problem, ProblemSpec, DEFAULT_EPS,
    MAX_ORDER_LIMIT,
};
pub use verify::{verify_all, verify_fixture, FixtureOutcome, FIXTURES};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: parse error at line {line}, column {column}: {message}")]
    Parse {
        field: &'static str,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Unsupported(#[from] AbelianError),
    #[error("oracle: {0}")]
    Oracle(#[from] OracleError),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl CliError {
    /// 2 for bad input, 3 for failures of the pipeline itself.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Oracle(OracleError::InvalidConfig(_))
            | CliError::Write { .. }
            | CliError::Internal(_) => 3,
            _ => 2,
        }
    }
}

impl From<FrancoiseError> for CliError {
    fn from(e: FrancoiseError) -> Self {
        match e {
            FrancoiseError::Family(f) => CliError::Unsupported(f),
            FrancoiseError::InvalidMaxOrder => CliError::Invalid(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<GodbillonError> for CliError {
    fn from(e: GodbillonError) -> Self {
        match e {
            GodbillonError::Family(f) => CliError::Unsupported(f),
            GodbillonError::Francoise(f) => f.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

pub fn read_spec(path: &Path) -> Result<ProblemSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    load_spec(&text)
}

fn polynomial_omega(p: &Problem) -> Result<&Form1Planar<BivarPoly>, CliError> {
    p.omega_poly.as_ref().ok_or_else(|| {
        CliError::Invalid("rational coefficients are only supported by the oracle".into())
    })
}

fn base_report(command: &'static str, p: &Problem) -> RunReport {
    RunReport {
        command,
        hamiltonian: p.family.hamiltonian().to_string(),
        omega: p.omega.to_string(),
        melnikov: None,
        gv: None,
        oracle: None,
    }
}

fn pair_texts(pairs: &[GVPair]) -> Vec<PairText> {
    pairs
        .iter()
        .map(|p| PairText {
            g: p.g.to_string(),
            r: p.r.to_string(),
        })
        .collect()
}

fn melnikov_report(res: &MelnikovResult, max_order: usize) -> MelnikovReport {
    let length = match sequence_length(&res.sequence, max_order) {
        SequenceLength::Finite(l) => LengthText::Finite(l),
        SequenceLength::ExceedsMax => LengthText::Marker("exceeds_max"),
    };
    MelnikovReport {
        max_order,
        functions: res.melnikov.iter().map(ToString::to_string).collect(),
        first_nonzero: res.first_nonzero,
        pairs: res
            .sequence
            .pairs()
            .iter()
            .map(|p| PairText {
                g: p.g().to_string(),
                r: p.r().to_string(),
            })
            .collect(),
        length,
    }
}

/// Runs the Melnikov pipeline and checks every pair against the
/// Gelfand-Leray identity.
pub(crate) fn run_melnikov(p: &Problem, max_order: usize) -> Result<MelnikovResult, CliError> {
    spec::check_order("max_order", max_order, 1)?;
    let w = polynomial_omega(p)?;
    let res = melnikov_sequence(&p.family, w, max_order)?;
    if gelfand_leray_residuals(&res.sequence, &p.family)
        .iter()
        .any(|r| !r.is_zero())
    {
        return Err(CliError::Internal("Gelfand-Leray identity fails".into()));
    }
    Ok(res)
}

/// Melnikov functions and pairs up to `max_order` (the problem file's value when
/// `None`).
pub fn cmd_melnikov(spec: &ProblemSpec, max_order: Option<usize>) -> Result<RunReport, CliError> {
    let p = spec.validate()?;
    let max_order = max_order.unwrap_or(p.max_order);
    let res = run_melnikov(&p, max_order)?;
    let mut report = base_report("melnikov", &p);
    report.melnikov = Some(melnikov_report(&res, max_order));
    Ok(report)
}

fn defects(
    p: &Problem,
    w: &Form1Planar<BivarPoly>,
    pairs: &[GVPair],
    k: usize,
) -> Result<Vec<bool>, CliError> {
    (0..=k)
        .map(|j| {
            if pairs.len() < j + 1 {
                return Ok(false);
            }
            let omega = assemble_omega(&p.family, w, pairs, j)?;
            Ok(integrability_defect(&omega, j)?.is_zero())
        })
        .collect()
}

/// Godbillon-Vey data of order `k`, or the obstruction that prevents it.
///
/// Order `k` uses the pairs `1..=k+1`, so the Melnikov functions are
/// computed through `M_{k+1}`.
pub fn cmd_gv(spec: &ProblemSpec, k: usize) -> Result<RunReport, CliError> {
    let p = spec.validate()?;
    spec::check_order("k", k, 0)?;
    let w = polynomial_omega(&p)?;
    let order = k + 1;
    let res = run_melnikov(&p, order)?;
    let pairs = gv_pairs_from_francoise(&res.sequence);
    let defect_zero = defects(&p, w, &pairs, k)?;
    let mut report = base_report("gv", &p);
    report.melnikov = Some(melnikov_report(&res, order));

    if let Some(mu) = res.first_nonzero {
        // the independent solver must stall at the same index
        match solve_gv(&p.family, w, k) {
            Err(GodbillonError::ObstructionAtOrder { order }) if order == mu => {}
            other => {
                return Err(CliError::Internal(format!(
                    "Melnikov obstruction at {mu} but solver returned {other:?}"
                )))
            }
        }
        report.gv = Some(GvReport {
            k,
            obstruction: Some(Obstruction {
                order: mu,
                witness: res.melnikov[mu - 1].to_string(),
            }),
            gv_pairs: pair_texts(&pairs),
            defect_zero,
            first_integral: None,
            integrating_factor: None,
            read_back: None,
            solver_agrees: None,
            theta: None,
            classical: None,
        });
        return Ok(report);
    }

    if defect_zero.iter().any(|z| !z) {
        return Err(CliError::Internal(
            "assembled form has a nonzero defect".into(),
        ));
    }
    let fint = first_integral(&p.family, &res.sequence, order)?;
    let omega = assemble_omega(&p.family, w, &pairs, k)?;
    let factor = integrating_factor(&omega, &fint, k)?;
    let read_back = read_gv_pairs(&p.family, w, &fint.differential(), k)? == pairs;
    let solution = solve_gv(&p.family, w, k)?;
    let solver_agrees =
        solution.order() == k && integrability_defect(&solution.omega(&p.family, w), k)?.is_zero();
    let witness = length_two_witness(&p.family, &res.sequence, order)?;
    let classical = match classical_gv_forms(&fint, k) {
        Ok(c) => ClassicalReport {
            degenerate: false,
            eta: c.eta.iter().map(ToString::to_string).collect(),
            taylor: c.taylor.iter().map(ToString::to_string).collect(),
            relations_hold: c.relation_residuals().iter().all(|r| r.is_zero()),
        },
        Err(GodbillonError::DegenerateNormalization) => ClassicalReport {
            degenerate: true,
            eta: Vec::new(),
            taylor: Vec::new(),
            relations_hold: true,
        },
        Err(e) => return Err(e.into()),
    };
    if !(read_back && solver_agrees && classical.relations_hold) {
        return Err(CliError::Internal(format!(
            "cross-checks failed: read_back {read_back}, solver {solver_agrees}, relations {}",
            classical.relations_hold
        )));
    }
    report.gv = Some(GvReport {
        k,
        obstruction: None,
        gv_pairs: pair_texts(&pairs),
        defect_zero,
        first_integral: Some(fint.series.to_string()),
        integrating_factor: Some(factor.to_string()),
        read_back: Some(read_back),
        solver_agrees: Some(solver_agrees),
        theta: Some(ThetaReport {
            g: witness.theta.g.to_string(),
            theta: witness.theta.series().to_string(),
            holds: witness.holds(),
        }),
        classical: Some(classical),
    });
    Ok(report)
}

/// Overrides for the oracle run.
#[derive(Clone, Debug, Default)]
pub struct OracleRequest {
    pub t: Option<Vec<f64>>,
    pub eps: Option<Vec<f64>>,
    pub csv: Option<PathBuf>,
    pub config: HolonomyConfig,
}

/// Agreement test between a numeric and a symbolic `M_1`: relative for
/// values above 1, absolute below.
pub fn m1_agrees(numeric: f64, symbolic: f64) -> bool {
    (numeric - symbolic).abs() <= 1e-4 * symbolic.abs().max(1.0)
}

/// Displacement table over the `t x eps` grid plus an `M_1` estimate per
/// `t`, cross-checked against the exact value for polynomial forms.
pub fn cmd_oracle(spec: &ProblemSpec, req: &OracleRequest) -> Result<RunReport, CliError> {
    let p = spec.validate()?;
    let ts = req.t.clone().unwrap_or_else(|| p.t.clone());
    let epss = req.eps.clone().unwrap_or_else(|| p.eps.clone());
    spec::check_grid(&ts, &epss)?;
    if ts.is_empty() {
        return Err(CliError::Invalid(
            "oracle needs at least one t sample".into(),
        ));
    }
    let w = NumericForm::from_rational(&p.omega);
    let samples = sweep(&p.family, &w, &ts, &epss, &req.config)?;
    let symbolic = match &p.omega_poly {
        Some(_) => Some(run_melnikov(&p, 1)?.melnikov[0].clone()),
        None => None,
    };
    let mut estimates = Vec::new();
    for &t in &ts {
        let est = melnikov_estimate(&p.family, &w, t, 1, &req.config, &FitOptions::default())?;
        let m1 = est.coefficients[0];
        let symbolic_m1 = symbolic.as_ref().map(|m| m.eval_f64(t));
        estimates.push(EstimateRow {
            t,
            m1,
            condition_number: est.condition_number,
            ill_conditioned: est.ill_conditioned,
            symbolic_m1,
            agrees: symbolic_m1.map(|s| m1_agrees(m1, s)),
        });
    }
    if let Some(path) = &req.csv {
        let mut buf = Vec::new();
        write_csv(&mut buf, &samples).expect("writing to memory");
        fs::write(path, buf).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
    }
    let mut report = base_report("oracle", &p);
    report.oracle = Some(OracleReport {
        max_abs_delta: samples.iter().map(|s| s.delta.abs()).fold(0.0, f64::max),
        samples: samples.iter().map(SampleRow::from).collect(),
        estimates,
        csv: req.csv.as_ref().map(|c| c.display().to_string()),
    });
    Ok(report)
}
