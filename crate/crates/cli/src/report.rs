use serde::Serialize;

use foliate::oracle::DisplacementSample;

/// Everything one command produced. Field order is fixed, and no map types
/// appear, so equal inputs serialize to equal bytes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    #[serde(rename = "F")]
    pub hamiltonian: String,
    pub omega: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub melnikov: Option<MelnikovReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gv: Option<GvReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
}

impl RunReport {
    /// 1 when an obstruction was found, 0 otherwise.
    pub fn exit_code(&self) -> u8 {
        match &self.gv {
            Some(gv) if gv.obstruction.is_some() => 1,
            _ => 0,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report types serialize");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairText {
    pub g: String,
    pub r: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum LengthText {
    Finite(usize),
    Marker(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MelnikovReport {
    pub max_order: usize,
    /// `M_1, M_2, ...` up to the first nonzero one.
    pub functions: Vec<String>,
    pub first_nonzero: Option<usize>,
    pub pairs: Vec<PairText>,
    pub length: LengthText,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub order: usize,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaReport {
    /// The series `G` whose logarithmic derivative is `theta`.
    #[serde(rename = "G")]
    pub g: String,
    pub theta: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassicalReport {
    pub degenerate: bool,
    /// Factorial-normalized forms, `i!` times the Taylor coefficients.
    pub eta: Vec<String>,
    /// Raw Taylor coefficients of `dF_eps / (d F_eps/d eps)`.
    pub taylor: Vec<String>,
    pub relations_hold: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GvReport {
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<Obstruction>,
    pub gv_pairs: Vec<PairText>,
    /// Integrability verdict for every order `0..=k`.
    pub defect_zero: Vec<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_integral: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integrating_factor: Option<String>,
    /// Pairs read back from the differential of the first integral agree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub read_back: Option<bool>,
    /// The weight-by-weight solver reaches the same order independently.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver_agrees: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical: Option<ClassicalReport>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleRow {
    pub t: f64,
    pub eps: f64,
    pub delta: f64,
    pub est_error: f64,
}

impl From<&DisplacementSample> for SampleRow {
    fn from(s: &DisplacementSample) -> Self {
        SampleRow {
            t: s.t,
            eps: s.eps,
            delta: s.delta,
            est_error: s.est_error,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateRow {
    pub t: f64,
    pub m1: f64,
    pub condition_number: f64,
    pub ill_conditioned: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbolic_m1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agrees: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub samples: Vec<SampleRow>,
    pub max_abs_delta: f64,
    pub estimates: Vec<EstimateRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}
