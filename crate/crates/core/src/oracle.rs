//! Numeric displacement of `dF + eps w = 0` around the circle `F = t`.
//!
//! The leaf through `(sqrt(t), 0)` is followed once around in polar
//! coordinates, where it is a graph `rho(theta)`:
//!
//! `drho/dtheta = -eps rho (Q cos - P sin) / (2 rho + eps (P cos + Q sin))`.
//!
//! The transversal `y = 0, x > 0` is parametrized by the value of `F`, so the
//! displacement is `rho(2 pi)^2 - t`.

use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

use crate::abelian::OvalFamily;
use crate::algebra::{rational_to_f64, BivarPoly, RationalFunction};
use crate::exterior::Form1Planar;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("leaf left the annulus t/2 < F < 2t (t = {t}, eps = {eps}, theta = {theta})")]
    LeafEscapedAnnulus { t: f64, eps: f64, theta: f64 },
    #[error("leaf is not a graph over the angle (t = {t}, eps = {eps}, theta = {theta})")]
    DenominatorVanished { t: f64, eps: f64, theta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolonomyConfig {
    /// RK4 steps per revolution.
    pub step_count: usize,
    /// Absolute tolerance for the step-halving comparison.
    pub refine_tol: f64,
}

impl Default for HolonomyConfig {
    fn default() -> Self {
        HolonomyConfig {
            step_count: 20_000,
            refine_tol: 1e-12,
        }
    }
}

impl HolonomyConfig {
    pub fn validate(&self) -> Result<(), OracleError> {
        if self.step_count < 100 {
            return Err(OracleError::InvalidConfig(
                "step_count must be >= 100".into(),
            ));
        }
        if !(self.refine_tol > 0.0) {
            return Err(OracleError::InvalidConfig(
                "refine_tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct NumPoly(Vec<(f64, i32, i32)>);

impl NumPoly {
    fn new(p: &BivarPoly) -> Self {
        NumPoly(
            p.terms()
                .map(|(m, c)| (rational_to_f64(c), m.x as i32, m.y as i32))
                .collect(),
        )
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        self.0
            .iter()
            .map(|&(c, a, b)| c * x.powi(a) * y.powi(b))
            .sum()
    }
}

#[derive(Clone, Debug)]
struct NumRatio {
    num: NumPoly,
    den: Option<NumPoly>,
}

impl NumRatio {
    fn new(f: &RationalFunction) -> Self {
        let den = f.as_poly().is_none().then(|| NumPoly::new(f.denominator()));
        NumRatio {
            num: NumPoly::new(f.numerator()),
            den,
        }
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        let n = self.num.eval(x, y);
        match &self.den {
            Some(d) => n / d.eval(x, y),
            None => n,
        }
    }
}

/// A perturbation `P dx + Q dy` compiled for fast `f64` evaluation.
#[derive(Clone, Debug)]
pub struct NumericForm {
    p: NumRatio,
    q: NumRatio,
}

impl NumericForm {
    pub fn from_rational(w: &Form1Planar<RationalFunction>) -> Self {
        NumericForm {
            p: NumRatio::new(&w.p),
            q: NumRatio::new(&w.q),
        }
    }

    pub fn from_poly(w: &Form1Planar<BivarPoly>) -> Self {
        NumericForm::from_rational(&w.lift())
    }

    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        (self.p.eval(x, y), self.q.eval(x, y))
    }
}

/// `F` at the first return to the transversal.
pub fn holonomy_return(
    fam: &OvalFamily,
    w: &NumericForm,
    t: f64,
    eps: f64,
    cfg: &HolonomyConfig,
) -> Result<f64, OracleError> {
    return_displacement(fam, w, t, eps, cfg).map(|d| t + d)
}

/// `F(return) - t`, integrated as the deviation `rho - sqrt(t)` so that
/// rounding stays proportional to the displacement rather than to `t`.
fn return_displacement(
    fam: &OvalFamily,
    w: &NumericForm,
    t: f64,
    eps: f64,
    cfg: &HolonomyConfig,
) -> Result<f64, OracleError> {
    debug_assert_eq!(fam.hamiltonian(), &BivarPoly::circle_hamiltonian());
    cfg.validate()?;
    if !(t > 0.0) || !t.is_finite() || !eps.is_finite() {
        return Err(OracleError::InvalidConfig(format!(
            "need t > 0 and finite eps, got t = {t}, eps = {eps}"
        )));
    }
    let base = t.sqrt();
    let rhs = |theta: f64, dev: f64| -> Result<f64, OracleError> {
        let rho = base + dev;
        let (s, c) = theta.sin_cos();
        let (p, q) = w.eval(rho * c, rho * s);
        let den = 2.0 * rho + eps * (p * c + q * s);
        let value = -eps * rho * (q * c - p * s) / den;
        if !value.is_finite() || den <= 1e-9 * rho {
            return Err(OracleError::DenominatorVanished { t, eps, theta });
        }
        Ok(value)
    };
    let h = 2.0 * PI / cfg.step_count as f64;
    let mut dev = 0.0;
    // compensated sum of the increments
    let mut carry = 0.0;
    for i in 0..cfg.step_count {
        let th = i as f64 * h;
        let k1 = rhs(th, dev)?;
        let k2 = rhs(th + h / 2.0, dev + h / 2.0 * k1)?;
        let k3 = rhs(th + h / 2.0, dev + h / 2.0 * k2)?;
        let k4 = rhs(th + h, dev + h * k3)?;
        let inc = h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4) - carry;
        let next = dev + inc;
        carry = (next - dev) - inc;
        dev = next;
        let f = (base + dev) * (base + dev);
        if !(f > t / 2.0 && f < 2.0 * t) {
            return Err(OracleError::LeafEscapedAnnulus {
                t,
                eps,
                theta: th + h,
            });
        }
    }
    Ok(dev * (2.0 * base + dev))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisplacementSample {
    pub t: f64,
    pub eps: f64,
    pub delta: f64,
    pub est_error: f64,
}

impl DisplacementSample {
    pub fn validated(&self, cfg: &HolonomyConfig) -> bool {
        self.est_error <= cfg.refine_tol
    }
}

/// Displacement from the doubled-step run, with the difference to the
/// `step_count` run as error estimate.
pub fn displacement(
    fam: &OvalFamily,
    w: &NumericForm,
    t: f64,
    eps: f64,
    cfg: &HolonomyConfig,
) -> Result<DisplacementSample, OracleError> {
    let coarse = return_displacement(fam, w, t, eps, cfg)?;
    let fine_cfg = HolonomyConfig {
        step_count: cfg.step_count * 2,
        ..*cfg
    };
    let fine = return_displacement(fam, w, t, eps, &fine_cfg)?;
    Ok(DisplacementSample {
        t,
        eps,
        delta: fine,
        est_error: (fine - coarse).abs(),
    })
}

/// All `(t, eps)` combinations, `t`-major, computed in parallel.
pub fn sweep(
    fam: &OvalFamily,
    w: &NumericForm,
    ts: &[f64],
    epss: &[f64],
    cfg: &HolonomyConfig,
) -> Result<Vec<DisplacementSample>, OracleError> {
    let grid: Vec<(f64, f64)> = ts
        .iter()
        .flat_map(|&t| epss.iter().map(move |&e| (t, e)))
        .collect();
    grid.par_iter()
        .map(|&(t, e)| displacement(fam, w, t, e, cfg))
        .collect()
}

pub fn write_csv<W: Write>(out: &mut W, samples: &[DisplacementSample]) -> io::Result<()> {
    writeln!(out, "t,eps,delta,est_error")?;
    for s in samples {
        writeln!(out, "{},{},{},{}", s.t, s.eps, s.delta, s.est_error)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    /// Largest `eps` of the geometric grid `base * 2^-j`.
    pub base_eps: f64,
    /// Interpolate with one more power instead of the least-squares fit.
    pub richardson: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            base_eps: 1e-3,
            richardson: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MelnikovEstimate {
    /// Estimates of `M_1(t)..M_m(t)`.
    pub coefficients: Vec<f64>,
    pub samples: Vec<DisplacementSample>,
    pub condition_number: f64,
    /// Root-mean-square misfit of the model on the grid.
    pub residual: f64,
    pub ill_conditioned: bool,
}

const ILL_CONDITIONED: f64 = 1e8;

/// Fits `Delta(t, eps)` on `eps_j = base 2^-j`, `j = 0..=2m`, by powers
/// `eps^1..eps^(m+1)` (or up to `eps^(2m+1)` with `richardson`), and returns
/// the first `m` coefficients.
///
/// Fitting only `m` powers would leave the `eps^(m+1)` term as a relative
/// bias of order `base`; the extra power absorbs it. More powers amplify
/// rounding noise in the top coefficients.
pub fn melnikov_estimate(
    fam: &OvalFamily,
    w: &NumericForm,
    t: f64,
    m: usize,
    cfg: &HolonomyConfig,
    opts: &FitOptions,
) -> Result<MelnikovEstimate, OracleError> {
    if m == 0 {
        return Err(OracleError::InvalidConfig("need at least one order".into()));
    }
    let npts = 2 * m + 1;
    let ncols = if opts.richardson { npts } else { m + 1 };
    let epss: Vec<f64> = (0..npts)
        .map(|j| opts.base_eps * 0.5f64.powi(j as i32))
        .collect();
    let samples = sweep(fam, w, &[t], &epss, cfg)?;
    // columns in the scaled variable u = eps / base keep the matrix O(1)
    let a = DMatrix::from_fn(npts, ncols, |i, j| {
        (epss[i] / opts.base_eps).powi(j as i32 + 1)
    });
    let b = DVector::from_iterator(npts, samples.iter().map(|s| s.delta));
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let condition_number = sv.max() / sv.min();
    let sol = svd
        .solve(&b, 0.0)
        .map_err(|e| OracleError::InvalidConfig(e.to_string()))?;
    let residual = ((&a * &sol - &b).norm_squared() / npts as f64).sqrt();
    let coefficients = (0..m)
        .map(|j| sol[j] / opts.base_eps.powi(j as i32 + 1))
        .collect();
    Ok(MelnikovEstimate {
        coefficients,
        samples,
        condition_number,
        residual,
        ill_conditioned: condition_number > ILL_CONDITIONED,
    })
}

/// `err(N) / err(2N)` for a known true displacement; about 16 for RK4.
pub fn convergence_ratio(
    fam: &OvalFamily,
    w: &NumericForm,
    t: f64,
    eps: f64,
    steps: usize,
    truth: f64,
) -> Result<f64, OracleError> {
    let run = |n: usize| {
        let cfg = HolonomyConfig {
            step_count: n,
            ..HolonomyConfig::default()
        };
        return_displacement(fam, w, t, eps, &cfg).map(|d| (d - truth).abs())
    };
    Ok(run(steps)? / run(2 * steps)?)
}

/// `w = F dr / r` with `r = 1 + x`, whose deformation has the first integral
/// `F r^eps`.
pub fn darboux_form() -> Form1Planar<RationalFunction> {
    let p: RationalFunction = "(x^2 + y^2)/(1 + x)".parse().expect("valid literal");
    Form1Planar::new(p, crate::algebra::Coeff::zero())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DarbouxReport {
    pub samples: Vec<DisplacementSample>,
    pub threshold: f64,
    pub passed: bool,
}

/// Displacements of the Darboux-integrable fixture at
/// `t in {0.25, 0.5}`, `eps in {1e-2, 1e-3}`; all must stay below `1e-8`.
pub fn darboux_fixture_check(cfg: &HolonomyConfig) -> Result<DarbouxReport, OracleError> {
    let fam = OvalFamily::circle();
    let w = NumericForm::from_rational(&darboux_form());
    let samples = sweep(&fam, &w, &[0.25, 0.5], &[1e-2, 1e-3], cfg)?;
    let threshold = 1e-8;
    let passed = samples.iter().all(|s| s.delta.abs() < threshold);
    Ok(DarbouxReport {
        samples,
        threshold,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_form(p: &str, q: &str) -> NumericForm {
        NumericForm::from_poly(&Form1Planar::new(p.parse().unwrap(), q.parse().unwrap()))
    }

    #[test]
    fn unperturbed_return_is_exact() {
        let fam = OvalFamily::circle();
        let w = poly_form("x y^3 + 1", "x^2");
        for t in [0.3, 1.0, 2.5] {
            let f = holonomy_return(&fam, &w, t, 0.0, &HolonomyConfig::default()).unwrap();
            assert!((f - t).abs() < 1e-12);
        }
    }

    #[test]
    fn config_is_validated() {
        let fam = OvalFamily::circle();
        let w = poly_form("y", "0");
        let bad = HolonomyConfig {
            step_count: 10,
            ..HolonomyConfig::default()
        };
        assert!(matches!(
            holonomy_return(&fam, &w, 1.0, 1e-3, &bad),
            Err(OracleError::InvalidConfig(_))
        ));
    }

    #[test]
    fn large_perturbation_escapes() {
        let fam = OvalFamily::circle();
        let w = poly_form("y", "0");
        let err = holonomy_return(&fam, &w, 1.0, 1.5, &HolonomyConfig::default()).unwrap_err();
        assert!(matches!(err, OracleError::LeafEscapedAnnulus { .. }));
        // the denominator 2 rho + eps P cos vanishes for a strong radial term
        let w = poly_form("-x", "-y");
        let err = holonomy_return(&fam, &w, 1.0, 2.5, &HolonomyConfig::default()).unwrap_err();
        assert!(matches!(err, OracleError::DenominatorVanished { .. }));
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        let s = DisplacementSample {
            t: 1.0,
            eps: 0.001,
            delta: 0.5,
            est_error: 0.0,
        };
        write_csv(&mut buf, &[s]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,eps,delta,est_error\n1,0.001,0.5,0\n"
        );
    }
}
