use serde::{Deserialize, Serialize};

use foliate::abelian::OvalFamily;
use foliate::algebra::{parse_rational_function, BivarPoly, RationalFunction};
use foliate::exterior::Form1Planar;
use foliate::francoise::DEFAULT_MAX_ORDER;

use crate::CliError;

/// Upper bound on `max_order` and `k`; the symbolic pipeline grows quickly
/// past it.
pub const MAX_ORDER_LIMIT: usize = 64;

pub const DEFAULT_EPS: [f64; 2] = [1e-2, 1e-3];

/// One problem document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(rename = "F")]
    pub hamiltonian: String,
    #[serde(default)]
    pub omega: OmegaSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSpec {
    #[serde(default = "zero_text")]
    pub dx: String,
    #[serde(default = "zero_text")]
    pub dy: String,
}

impl Default for OmegaSpec {
    fn default() -> Self {
        OmegaSpec {
            dx: zero_text(),
            dy: zero_text(),
        }
    }
}

fn zero_text() -> String {
    "0".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default)]
    pub t: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
}

/// Expected outcomes checked by `verify-all`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    /// `Some(None)` asserts that every computed function vanishes.
    #[serde(
        default,
        with = "double_option",
        skip_serializing_if = "Option::is_none"
    )]
    pub first_nonzero: Option<Option<usize>>,
    /// Text of the first nonzero Melnikov function.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub melnikov_first: Option<String>,
    /// Leading `g_1, g_2, ...` of the pair sequence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<String>>,
    /// Run the Godbillon-Vey pipeline at this `k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gv_k: Option<usize>,
    #[serde(
        default,
        with = "double_option",
        skip_serializing_if = "Option::is_none"
    )]
    pub obstruction: Option<Option<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_abs_delta: Option<f64>,
    /// Expected numeric `M_1` at every sampled `t`, relative tolerance 1e-6.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m1_estimate: Option<f64>,
}

mod double_option {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Option<usize>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().expect("skipped when absent").serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Option<usize>>, D::Error> {
        Option::<usize>::deserialize(d).map(Some)
    }
}

/// A checked problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub family: OvalFamily,
    pub omega: Form1Planar<RationalFunction>,
    /// Present when both coefficients are polynomials.
    pub omega_poly: Option<Form1Planar<BivarPoly>>,
    pub max_order: usize,
    pub t: Vec<f64>,
    pub eps: Vec<f64>,
}

pub fn load_spec(text: &str) -> Result<ProblemSpec, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn parse_field(field: &'static str, text: &str) -> Result<RationalFunction, CliError> {
    let text = if text.trim().is_empty() { "0" } else { text };
    parse_rational_function(text).map_err(|e| {
        let (line, column) = line_column(text, e.column);
        CliError::Parse {
            field,
            line,
            column,
            message: e.message,
        }
    })
}

/// Converts a 1-based character offset into a 1-based line and column.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut column = 1;
    for c in text.chars().take(offset.saturating_sub(1)) {
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<Problem, CliError> {
        let f = parse_field("F", &self.hamiltonian)?;
        let f = f
            .as_poly()
            .cloned()
            .ok_or_else(|| CliError::Invalid("F must be a polynomial".into()))?;
        let family = OvalFamily::new(f)?;
        let omega = Form1Planar::new(
            parse_field("omega.dx", &self.omega.dx)?,
            parse_field("omega.dy", &self.omega.dy)?,
        );
        let omega_poly = match (omega.p.as_poly(), omega.q.as_poly()) {
            (Some(p), Some(q)) => Some(Form1Planar::new(p.clone(), q.clone())),
            _ => None,
        };
        let max_order = self.max_order.unwrap_or(DEFAULT_MAX_ORDER);
        check_order("max_order", max_order, 1)?;
        let (t, eps) = match &self.oracle {
            Some(o) => (
                o.t.clone(),
                o.eps.clone().unwrap_or_else(|| DEFAULT_EPS.to_vec()),
            ),
            None => (Vec::new(), DEFAULT_EPS.to_vec()),
        };
        check_grid(&t, &eps)?;
        Ok(Problem {
            family,
            omega,
            omega_poly,
            max_order,
            t,
            eps,
        })
    }
}

pub(crate) fn check_order(name: &str, v: usize, min: usize) -> Result<(), CliError> {
    if v < min || v > MAX_ORDER_LIMIT {
        return Err(CliError::Invalid(format!(
            "{name} must lie in {min}..={MAX_ORDER_LIMIT}, got {v}"
        )));
    }
    Ok(())
}

pub(crate) fn check_grid(t: &[f64], eps: &[f64]) -> Result<(), CliError> {
    if let Some(bad) = t.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(CliError::Invalid(format!(
            "oracle t values must be positive, got {bad}"
        )));
    }
    if eps.is_empty() {
        return Err(CliError::Invalid("oracle eps grid is empty".into()));
    }
    if let Some(bad) = eps.iter().find(|v| !v.is_finite()) {
        return Err(CliError::Invalid(format!(
            "oracle eps values must be finite, got {bad}"
        )));
    }
    Ok(())
}
