//! Job configuration, command dispatch and result serialization for the
//! `reftorsion` binary.
//!
//! Scan CSV columns, in order:
//! `a_re,a_im,re_t,im_t,abs_t,t_rs,im_eta,cr_residual,status`.
//! Rows that could not be computed keep their `a` columns, leave the
//! numeric columns empty and carry the error code in `status`.

use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::circle::{
    self, arg_derivative_check, build_from_log_params, build_from_monodromy, build_rank1, cauchy_riemann_residual,
    eta_variation_check, refined_torsion, trs_from_report, CircleModel, ConnectionFamily, LogParam, Region,
};
use crate::complexcut::CutAngle;
use crate::determinant::{
    graded_ldet, ldet, symmetric_spectrum_det_with_tolerance, verify_det_eta, verify_det_eta_upper,
};
use crate::error::{Error, Result};
use crate::spectrum::{
    check_det_eta_hypothesis, det_eta_angle, imaginary_axis_counts, is_symmetric_about_real_axis, GradedComponent,
    GradedSpectrum, Spectrum,
};
use crate::tolerances::Tolerances;
use crate::zetafun::{eta_function, eta_invariant, spectral_zeta, zeta_at_zero, zeta_ds_at_zero};

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "a_re,a_im,re_t,im_t,abs_t,t_rs,im_eta,cr_residual,status";

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "REFTORSION_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Torsion,
    Zeta,
    Eta,
    Det,
    Verify,
    Scan,
    Monodromy,
    Variation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum ModelSpec {
    Rank1 {
        #[serde(with = "crate::serde_complex")]
        a: Complex64,
    },
    LogParams {
        params: Vec<LogParam>,
    },
    Monodromy {
        #[serde(with = "crate::serde_complex::matrix")]
        matrix: DMatrix<Complex64>,
    },
    Spectrum {
        spectrum: Spectrum,
    },
    Graded {
        components: Vec<GradedComponent>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GridSpec {
    pub region: Region,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    /// `a_j(t) = a_j + t`
    Shift,
    /// `a_j(t) = a_j + amplitude · sin t`
    Sine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct VariationSpec {
    pub path: PathKind,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub t: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_amplitude() -> f64 {
    0.1
}

fn default_dt() -> f64 {
    1e-4
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_theta() -> f64 {
    -FRAC_PI_4
}

fn default_h() -> f64 {
    1e-4
}

fn default_steps() -> usize {
    512
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    /// Cut angle in radians.
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Points at which zeta and eta functions are evaluated.
    #[serde(default, with = "crate::serde_complex::vec")]
    pub s: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Finite-difference step for Cauchy-Riemann residuals.
    #[serde(default = "default_h")]
    pub h: f64,
    /// Runge-Kutta steps for parallel transport.
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variation: Option<VariationSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: JobConfig = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schemaVersion {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        if !self.theta.is_finite() {
            return Err(Error::Schema("theta must be finite".into()));
        }
        match &self.model {
            Some(ModelSpec::Spectrum { spectrum }) => spectrum.validate()?,
            Some(ModelSpec::Graded { components }) => GradedSpectrum {
                components: components.clone(),
            }
            .validate()?,
            _ => {}
        }
        Ok(())
    }
}

/// A residual paired with its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            residual,
            tolerance,
            pass: residual < tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub code: String,
    pub message: String,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        ErrorInfo {
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct JobResult {
    pub schema_version: u32,
    pub command: Command,
    pub config: JobConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
    #[serde(skip)]
    pub rows: Vec<ScanRow>,
}

impl JobResult {
    /// Process exit code: 0 when every check passed, 1 when a check failed,
    /// 2 when the job itself failed.
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            2
        } else if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("results serialize");
        s.push('\n');
        s
    }

    /// CSV rendering; only scans produce tables.
    pub fn to_csv(&self) -> Result<String> {
        if self.command != Command::Scan {
            return Err(Error::Schema("csv output is only available for scan".into()));
        }
        Ok(rows_to_csv(&self.rows))
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn complex_value(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn circle_model(model: &ModelSpec) -> Result<CircleModel> {
    match model {
        ModelSpec::Rank1 { a } => build_rank1(*a),
        ModelSpec::LogParams { params } => build_from_log_params(params.clone()),
        ModelSpec::Monodromy { matrix } => build_from_monodromy(matrix),
        _ => Err(Error::Unsupported("this command needs a circle model".into())),
    }
}

fn plain_spectrum(model: &ModelSpec) -> Result<Spectrum> {
    match model {
        ModelSpec::Spectrum { spectrum } => {
            spectrum.validate()?;
            Ok(spectrum.clone())
        }
        ModelSpec::Graded { .. } => Err(Error::Unsupported("graded spectra are accepted by det only".into())),
        other => circle_model(other)?.spectrum(),
    }
}

fn require_model(config: &JobConfig) -> Result<&ModelSpec> {
    config.model.as_ref().ok_or_else(|| Error::Schema("missing field `model`".into()))
}

struct Outcome {
    result: Value,
    checks: Vec<Check>,
    rows: Vec<ScanRow>,
}

impl Outcome {
    fn new(result: Value, checks: Vec<Check>) -> Self {
        Outcome {
            result,
            checks,
            rows: Vec::new(),
        }
    }
}

/// Run one job. Domain errors end up in the result rather than in `Err`.
pub fn run(command: Command, config: &JobConfig) -> JobResult {
    let outcome = config.validate().and_then(|()| match config.command {
        Some(c) if c != command => Err(Error::Schema(format!(
            "config names command {c:?} but {command:?} was requested"
        ))),
        _ => dispatch(command, config),
    });
    let (result, checks, rows, error) = match outcome {
        Ok(o) => (Some(o.result), o.checks, o.rows, None),
        Err(e) => (None, Vec::new(), Vec::new(), Some(ErrorInfo::from(&e))),
    };
    JobResult {
        schema_version: SCHEMA_VERSION,
        command,
        config: config.clone(),
        passed: error.is_none() && checks.iter().all(|c| c.pass),
        result,
        checks,
        error,
        wall_time_seconds: None,
        rows,
    }
}

fn dispatch(command: Command, config: &JobConfig) -> Result<Outcome> {
    let tol = &config.tolerances;
    let theta = CutAngle::new(config.theta);
    match command {
        Command::Torsion => {
            let model = circle_model(require_model(config)?)?;
            Ok(Outcome::new(
                torsion_value(&model)?,
                torsion_checks(&model, tol)?,
            ))
        }
        Command::Zeta => {
            let spec = plain_spectrum(require_model(config)?)?;
            let values: Vec<Value> = config
                .s
                .iter()
                .map(|&s| match spectral_zeta(&spec, theta, s) {
                    Ok(z) => json!({ "s": complex_value(s), "value": complex_value(z.value), "errorEstimate": z.error_estimate }),
                    Err(e) => json!({ "s": complex_value(s), "error": to_value(&ErrorInfo::from(&e)) }),
                })
                .collect();
            Ok(Outcome::new(
                json!({
                    "theta": config.theta,
                    "values": values,
                    "zetaAtZero": complex_value(zeta_at_zero(&spec, theta)?),
                    "zetaDsAtZero": complex_value(zeta_ds_at_zero(&spec, theta)?),
                }),
                Vec::new(),
            ))
        }
        Command::Eta => {
            let spec = plain_spectrum(require_model(config)?)?;
            let (plus, minus) = imaginary_axis_counts(&spec)?;
            let values: Vec<Value> = config
                .s
                .iter()
                .map(|&s| match eta_function(&spec, theta, s) {
                    Ok(v) => json!({ "s": complex_value(s), "value": complex_value(v) }),
                    Err(e) => json!({ "s": complex_value(s), "error": to_value(&ErrorInfo::from(&e)) }),
                })
                .collect();
            Ok(Outcome::new(
                json!({
                    "eta": complex_value(eta_invariant(&spec)?),
                    "mPlus": plus,
                    "mMinus": minus,
                    "theta": config.theta,
                    "values": values,
                }),
                Vec::new(),
            ))
        }
        Command::Det => {
            let r = match require_model(config)? {
                ModelSpec::Graded { components } => graded_ldet(
                    &GradedSpectrum {
                        components: components.clone(),
                    },
                    theta,
                )?,
                other => ldet(&plain_spectrum(other)?, theta)?,
            };
            Ok(Outcome::new(to_value(&r), Vec::new()))
        }
        Command::Verify => verify(require_model(config)?, theta, tol),
        Command::Scan => {
            let grid = config.grid.ok_or_else(|| Error::Schema("scan needs a `grid`".into()))?;
            grid.region.validate()?;
            let rows = scan_parallel(&grid, config.h);
            let ok: Vec<&ScanRow> = rows.iter().filter(|r| r.status == "ok").collect();
            let max_abs = ok.iter().filter_map(|r| r.abs_t).fold(0.0, f64::max);
            let max_cr = ok.iter().filter_map(|r| r.cr_residual).fold(0.0, f64::max);
            let closed = ok
                .iter()
                .filter_map(|r| {
                    let t = Complex64::new(r.re_t?, r.im_t?);
                    let exact = 1.0 - (Complex64::new(0.0, std::f64::consts::TAU) * r.a()).exp();
                    Some((t - exact).norm() / (1.0 + t.norm()))
                })
                .fold(0.0, f64::max);
            let mut checks = Vec::new();
            if !ok.is_empty() {
                checks.push(Check::new("closedForm", closed, tol.closed_form));
                checks.push(Check::new("cauchyRiemann", max_cr / max_abs.max(f64::MIN_POSITIVE), tol.cauchy_riemann));
            }
            let result = json!({
                "columns": CSV_HEADER.split(',').collect::<Vec<_>>(),
                "rows": to_value(&rows),
                "failedRows": rows.len() - ok.len(),
            });
            Ok(Outcome {
                result,
                checks,
                rows,
            })
        }
        Command::Monodromy => monodromy_job(require_model(config)?, config.steps, tol),
        Command::Variation => {
            let model = circle_model(require_model(config)?)?;
            let spec = config.variation.unwrap_or(VariationSpec {
                path: PathKind::Shift,
                amplitude: default_amplitude(),
                t: 0.0,
                dt: default_dt(),
            });
            variation_job(&model, &spec, config.steps, tol)
        }
    }
}

fn torsion_value(model: &CircleModel) -> Result<Value> {
    let report = refined_torsion(model)?;
    let trs = trs_from_report(model, &report);
    Ok(json!({
        "model": to_value(model),
        "report": to_value(&report),
        "closedForm": complex_value(model.closed_form_torsion()),
        "raySingerComparison": to_value(&trs),
    }))
}

fn torsion_checks(model: &CircleModel, tol: &Tolerances) -> Result<Vec<Check>> {
    let report = refined_torsion(model)?;
    let trs = trs_from_report(model, &report);
    let closed = model.closed_form_torsion();
    let mut checks = vec![
        Check::new("detBEta", report.residual, tol.identity),
        Check::new(
            "closedForm",
            (report.torsion - closed).norm() / (1.0 + report.torsion.norm()),
            tol.closed_form,
        ),
        Check::new("raySingerLog", trs.log_residual, tol.ray_singer),
        Check::new("raySingerModulus", trs.modulus_residual, tol.ray_singer),
        Check::new("argEta", trs.arg_residual, tol.ray_singer),
    ];
    if model.is_unitary() {
        checks.push(Check::new(
            "unitaryModulus",
            (report.torsion.norm() - report.ray_singer).abs(),
            tol.ray_singer,
        ));
    }
    Ok(checks)
}

fn verify(model: &ModelSpec, theta: CutAngle, tol: &Tolerances) -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut result = serde_json::Map::new();
    if matches!(model, ModelSpec::Rank1 { .. } | ModelSpec::LogParams { .. } | ModelSpec::Monodromy { .. }) {
        let m = circle_model(model)?;
        checks.extend(torsion_checks(&m, tol)?);
        result.insert("torsion".into(), torsion_value(&m)?);
    }
    let spec = plain_spectrum(model)?;
    // fall back to an automatic angle when the requested one violates the sector hypothesis
    let cut = match check_det_eta_hypothesis(&spec, theta) {
        Ok(()) => theta,
        Err(_) => det_eta_angle(&spec)?,
    };
    result.insert("thetaUsed".into(), json!(cut.given()));
    let lower = verify_det_eta(&spec, cut)?;
    let upper = verify_det_eta_upper(&spec, cut)?;
    checks.push(Check::new("detEta", lower.residual, tol.identity));
    checks.push(Check::new("detEtaUpper", upper.residual, tol.identity));
    result.insert("detEta".into(), to_value(&lower));
    result.insert("detEtaUpper".into(), to_value(&upper));
    if is_symmetric_about_real_axis(&spec) {
        let r = symmetric_spectrum_det_with_tolerance(&spec, cut, tol.reality)?;
        checks.push(Check::new("realCoefficients", r.residual, tol.finite_arithmetic));
        result.insert("realCoefficients".into(), to_value(&r));
    }
    Ok(Outcome::new(Value::Object(result), checks))
}

fn monodromy_job(model: &ModelSpec, steps: usize, tol: &Tolerances) -> Result<Outcome> {
    let m = circle_model(model)?;
    let diag: Vec<Complex64> = m
        .params
        .iter()
        .flat_map(|p| std::iter::repeat_n(p.a, p.multiplicity as usize))
        .collect();
    let n = diag.len();
    let family = ConnectionFamily::constant(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
        diag.iter().map(|a| Complex64::i() * a).collect(),
    )));
    let phi = circle::monodromy(&family, 0.0, steps)?;
    let alpha = phi
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("parallel transport is singular".into()))?;
    let det_alpha = (DMatrix::<Complex64>::identity(n, n) - &alpha).determinant();
    let torsion = circle::torsion(&m)?;
    let mut checks = vec![Check::new(
        "torsionEqualsDetIMinusAlpha",
        (torsion - det_alpha).norm() / (1.0 + torsion.norm()),
        tol.closed_form,
    )];
    if let ModelSpec::Monodromy { matrix } = model {
        let det_m = (DMatrix::<Complex64>::identity(n, n) - matrix).determinant();
        checks.push(Check::new(
            "torsionEqualsDetIMinusM",
            (torsion - det_m).norm() / (1.0 + torsion.norm()),
            tol.closed_form,
        ));
    }
    #[derive(Serialize)]
    #[serde(rename_all = "camelCase")]
    struct Out {
        #[serde(with = "crate::serde_complex::matrix")]
        parallel_transport: DMatrix<Complex64>,
        #[serde(with = "crate::serde_complex::matrix")]
        representation: DMatrix<Complex64>,
        #[serde(with = "crate::serde_complex")]
        arg: Complex64,
        #[serde(with = "crate::serde_complex")]
        det_i_minus_alpha: Complex64,
        #[serde(with = "crate::serde_complex")]
        torsion: Complex64,
        steps: usize,
    }
    let out = Out {
        arg: circle::arg_class(&phi),
        parallel_transport: phi,
        representation: alpha,
        det_i_minus_alpha: det_alpha,
        torsion,
        steps,
    };
    Ok(Outcome::new(to_value(&out), checks))
}

fn variation_job(model: &CircleModel, spec: &VariationSpec, steps: usize, tol: &Tolerances) -> Result<Outcome> {
    let base: Vec<Complex64> = model
        .params
        .iter()
        .flat_map(|p| std::iter::repeat_n(p.a, p.multiplicity as usize))
        .collect();
    let n = base.len();
    let (scale, sine) = match spec.path {
        PathKind::Shift => (1.0, false),
        PathKind::Sine => (spec.amplitude, true),
    };
    let a = move |t: f64| {
        let shift = if sine { scale * t.sin() } else { t };
        base.iter().map(|a| a + shift).collect::<Vec<_>>()
    };
    let da = move |t: f64| {
        let slope = if sine { scale * t.cos() } else { 1.0 };
        vec![Complex64::new(slope, 0.0); n]
    };
    let family = ConnectionFamily::diagonal_path(n, a.clone(), da);
    let arg = arg_derivative_check(&family, spec.t, spec.dt, steps)?;
    let eta = eta_variation_check(a, da, spec.t, spec.dt)?;
    let checks = vec![
        Check::new("etaVariation", eta.residual, tol.variation),
        Check::new("argDerivative", arg.residual, tol.variation),
    ];
    Ok(Outcome::new(
        json!({ "etaVariation": to_value(&eta), "argDerivative": to_value(&arg), "path": to_value(spec) }),
        checks,
    ))
}

/// One row of an `a`-plane scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanRow {
    pub a_re: f64,
    pub a_im: f64,
    pub re_t: Option<f64>,
    pub im_t: Option<f64>,
    pub abs_t: Option<f64>,
    pub t_rs: Option<f64>,
    pub im_eta: Option<f64>,
    pub cr_residual: Option<f64>,
    pub status: String,
}

impl ScanRow {
    pub fn a(&self) -> Complex64 {
        Complex64::new(self.a_re, self.a_im)
    }

    fn failed(a: Complex64, e: &Error) -> Self {
        ScanRow {
            a_re: a.re,
            a_im: a.im,
            re_t: None,
            im_t: None,
            abs_t: None,
            t_rs: None,
            im_eta: None,
            cr_residual: None,
            status: e.code().to_string(),
        }
    }
}

fn scan_row(a: Complex64, h: f64) -> ScanRow {
    let compute = || -> Result<ScanRow> {
        let report = refined_torsion(&build_rank1(a)?)?;
        let cr = cauchy_riemann_residual(a, h)?;
        Ok(ScanRow {
            a_re: a.re,
            a_im: a.im,
            re_t: Some(report.torsion.re),
            im_t: Some(report.torsion.im),
            abs_t: Some(report.torsion.norm()),
            t_rs: Some(report.ray_singer),
            im_eta: Some(report.im_eta),
            cr_residual: Some(cr),
            status: "ok".into(),
        })
    };
    compute().unwrap_or_else(|e| ScanRow::failed(a, &e))
}

/// Evaluate every grid point, in parallel, returning rows in grid order.
pub fn scan_parallel(grid: &GridSpec, h: f64) -> Vec<ScanRow> {
    if grid.n == 0 {
        return Vec::new();
    }
    grid.region.grid(grid.n).into_par_iter().map(|a| scan_row(a, h)).collect()
}

fn csv_field(v: Option<f64>) -> String {
    v.map(|x| (x + 0.0).to_string()).unwrap_or_default()
}

pub fn rows_to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.a_re,
            r.a_im,
            csv_field(r.re_t),
            csv_field(r.im_t),
            csv_field(r.abs_t),
            csv_field(r.t_rs),
            csv_field(r.im_eta),
            csv_field(r.cr_residual),
            r.status
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> JobConfig {
        JobConfig::from_json(text).unwrap()
    }

    fn re_im(v: &Value) -> Complex64 {
        Complex64::new(v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap())
    }

    #[test]
    fn torsion_command() {
        let c = parse(r#"{"model": {"kind": "rank1", "a": {"re": 0.5, "im": 0}}}"#);
        let r = run(Command::Torsion, &c);
        assert_eq!(r.exit_code(), 0, "{}", r.to_json());
        let t = re_im(&r.result.unwrap()["report"]["torsion"]);
        assert!((t - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eta_command() {
        let c = parse(r#"{"model": {"kind": "rank1", "a": {"re": 0.25}}}"#);
        let r = run(Command::Eta, &c);
        let eta = re_im(&r.result.unwrap()["eta"]);
        assert!((eta - Complex64::new(0.25, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn verify_command() {
        let c = parse(
            r#"{"model": {"kind": "spectrum", "spectrum": {"kind": "finite", "eigenvalues": [
                {"value": {"re": 0, "im": 1}, "multiplicity": 1},
                {"value": {"re": 0, "im": -1}, "multiplicity": 1}]}},
                "theta": -0.7853981633974483}"#,
        );
        let r = run(Command::Verify, &c);
        assert_eq!(r.exit_code(), 0, "{}", r.to_json());
        assert!(r.checks.iter().any(|c| c.name == "detEta" && c.residual < 1e-14));
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(JobConfig::from_json(r#"{"model": 3}"#), Err(Error::Schema(_))));
        assert!(matches!(JobConfig::from_json(r#"{"schemaVersion": 2}"#), Err(Error::Schema(_))));
        assert!(matches!(JobConfig::from_json(r#"{"bogus": 1}"#), Err(Error::Schema(_))));
        let r = run(Command::Torsion, &parse("{}"));
        assert_eq!(r.error.as_ref().unwrap().code, "SchemaError");
        assert_eq!(r.exit_code(), 2);
        let r = run(Command::Torsion, &parse(r#"{"model": {"kind": "rank1", "a": {"re": 2}}}"#));
        assert_eq!(r.error.unwrap().code, "NonAcyclic");
    }

    #[test]
    fn scans() {
        let empty = parse(r#"{"grid": {"region": {"reMin": 0.2, "reMax": 0.8, "imMin": 0, "imMax": 0}, "n": 0}}"#);
        let r = run(Command::Scan, &empty);
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.to_csv().unwrap(), format!("{CSV_HEADER}\n"));
        let touching = parse(r#"{"grid": {"region": {"reMin": 0.5, "reMax": 1.0, "imMin": 0, "imMax": 0}, "n": 3}}"#);
        let r = run(Command::Scan, &touching);
        assert_eq!(r.rows.len(), 9);
        assert!(r.rows.iter().any(|row| row.status == "NonAcyclic"));
        assert!(r.rows.iter().filter(|row| row.status == "ok").count() >= 3);
    }

    #[test]
    fn restricted_spectrum_round_trip() {
        let text = r#"{"model": {"kind": "spectrum", "spectrum": {"kind": "restricted",
            "base": {"kind": "finite", "eigenvalues": [{"value": {"re": 2}, "multiplicity": 2}]},
            "subMult": {"0": 1}}}}"#;
        let c = parse(text);
        let once = serde_json::to_string(&c).unwrap();
        let twice = serde_json::to_string(&parse(&once)).unwrap();
        assert_eq!(once, twice);
        let r = run(Command::Det, &c);
        assert_eq!(r.exit_code(), 0, "{}", r.to_json());
    }
}
