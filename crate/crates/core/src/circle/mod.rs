//! Flat bundles over the circle `ℝ/2πℤ`.
//!
//! A rank-one connection `∇_a = d + ia dx` has odd signature operator
//! `B_even = -i d/dx + a` with eigenvalues `a + n`. A model of higher rank
//! is a direct sum of such lines, either listed by log-parameters or read
//! off from a monodromy matrix.
//!
//! Monodromy convention: parallel transport solves `Φ' + AΦ = 0`, so that
//! `Φ(2π) = e^{-2πia}` for `∇_a`. The representation attached to a model is
//! `α = Φ(2π)^{-1}`, whose eigenvalues are `e^{2πia_j}`; with it the torsion
//! is `det(I - α)`.

mod monodromy;
mod variation;

pub use monodromy::{arg_class, monodromy, ConnectionFamily, MatrixFn, MIN_STEPS};
pub use variation::{
    arg_derivative_check, cauchy_riemann_residual, eta_variation_check, holomorphy_scan, ArgDerivativeReport, EtaVariationReport,
    HolomorphyPoint, HolomorphyReport, Region, MAX_STEP, REGION_MARGIN,
};

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexcut::CutAngle;
use crate::determinant::ldet;
use crate::error::{Error, Result};
use crate::spectrum::{det_eta_angle, dist_to_integers, Spectrum};
use crate::tolerances;
use crate::zetafun::eta_invariant;

/// Sign relating `log(|T|/T^RS)` to `π Im Arg` under the monodromy
/// convention above; fixed after the first comparison and not recomputed.
pub const ARG_ETA_SIGN: f64 = 1.0;

/// Log-parameter `a_j` of one rank-one summand, with multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogParam {
    #[serde(with = "crate::serde_complex")]
    pub a: Complex64,
    #[serde(default = "one")]
    pub multiplicity: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CircleModel {
    pub params: Vec<LogParam>,
    /// The representation matrix `α` when the model was built from one.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "optional_matrix")]
    pub monodromy: Option<DMatrix<Complex64>>,
}

mod optional_matrix {
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(serde::Serialize, serde::Deserialize)]
    struct Wrapped(#[serde(with = "crate::serde_complex::matrix")] DMatrix<Complex64>);

    pub fn serialize<S: Serializer>(m: &Option<DMatrix<Complex64>>, ser: S) -> Result<S::Ok, S::Error> {
        match m {
            Some(m) => ser.serialize_some(&Wrapped(m.clone())),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<DMatrix<Complex64>>, D::Error> {
        Ok(Option::<Wrapped>::deserialize(de)?.map(|w| w.0))
    }
}

fn check_acyclic(a: Complex64) -> Result<()> {
    if !(a.re.is_finite() && a.im.is_finite()) {
        return Err(Error::InvalidInput(format!("log-parameter {a} is not finite")));
    }
    if dist_to_integers(a) <= tolerances::ACYCLIC {
        return Err(Error::NonAcyclic(a));
    }
    Ok(())
}

/// The line bundle with connection `∇_a`.
pub fn build_rank1(a: Complex64) -> Result<CircleModel> {
    build_from_log_params(vec![LogParam { a, multiplicity: 1 }])
}

pub fn build_from_log_params(params: Vec<LogParam>) -> Result<CircleModel> {
    if params.is_empty() {
        return Err(Error::InvalidInput("a model needs at least one log-parameter".into()));
    }
    for p in &params {
        check_acyclic(p.a)?;
        if p.multiplicity == 0 {
            return Err(Error::InvalidInput("log-parameter multiplicity must be positive".into()));
        }
    }
    Ok(CircleModel {
        params,
        monodromy: None,
    })
}

/// `a = log(μ)/(2πi)` with `Re a ∈ [0, 1)`.
fn log_param_of(mu: Complex64) -> Complex64 {
    let a = mu.ln() / Complex64::new(0.0, TAU);
    let a = a - a.re.floor();
    if a.re >= 1.0 {
        a - 1.0
    } else {
        a
    }
}

/// Eigenvalues of a complex square matrix via the Schur decomposition.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::InvalidInput("matrix must be square and non-empty".into()));
    }
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::EigenFailure("Schur iteration did not converge".into()))?;
    let t = schur.unpack().1;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// The model whose representation `α` is the given matrix.
pub fn build_from_monodromy(m: &DMatrix<Complex64>) -> Result<CircleModel> {
    let scale = m.norm().max(1.0);
    let mut params: Vec<LogParam> = Vec::new();
    for mu in eigenvalues(m)? {
        if mu.norm() <= f64::EPSILON * scale {
            return Err(Error::InvalidInput("monodromy matrix is singular".into()));
        }
        let a = log_param_of(mu);
        if (mu - 1.0).norm() <= tolerances::ACYCLIC || dist_to_integers(a) <= tolerances::ACYCLIC {
            return Err(Error::NonAcyclic(a));
        }
        match params.iter_mut().find(|p| p.a == a) {
            Some(p) => p.multiplicity += 1,
            None => params.push(LogParam { a, multiplicity: 1 }),
        }
    }
    Ok(CircleModel {
        params,
        monodromy: Some(m.clone()),
    })
}

impl CircleModel {
    pub fn rank(&self) -> u32 {
        self.params.iter().map(|p| p.multiplicity).sum()
    }

    pub fn is_unitary(&self) -> bool {
        self.params.iter().all(|p| p.a.im == 0.0)
    }

    /// Spectrum of `B_even`: `⋃_j {a_j + n}`.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let parts: Vec<Spectrum> = self
            .params
            .iter()
            .map(|p| Spectrum::lattice(p.a, p.multiplicity))
            .collect::<Result<_>>()?;
        if parts.len() == 1 {
            Ok(parts.into_iter().next().expect("one part"))
        } else {
            Spectrum::direct_sum(parts)
        }
    }

    /// Spectrum of the Laplacian `∇*∇` on functions: `⋃_j {|a_j + n|²}`.
    pub fn laplace_spectrum(&self) -> Result<Spectrum> {
        let parts: Vec<Spectrum> = self
            .params
            .iter()
            .map(|p| Spectrum::herm_quad_lattice(p.a, p.multiplicity))
            .collect::<Result<_>>()?;
        Spectrum::direct_sum(parts)
    }

    /// `det Φ(2π) = Π_j e^{-2πi a_j m_j}`.
    pub fn det_parallel_transport(&self) -> Complex64 {
        self.params
            .iter()
            .map(|p| (Complex64::new(0.0, -TAU) * p.a * p.multiplicity as f64).exp())
            .product()
    }

    /// `det(I - α)` computed from the eigenvalues `e^{2πia_j}`.
    pub fn closed_form_torsion(&self) -> Complex64 {
        self.params
            .iter()
            .map(|p| (1.0 - (Complex64::new(0.0, TAU) * p.a).exp()).powu(p.multiplicity))
            .product()
    }
}

/// Refined analytic torsion and the quantities entering its comparison
/// with the eta invariant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TorsionReport {
    #[serde(with = "crate::serde_complex")]
    pub torsion: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub xi: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub eta: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub graded_ldet: Complex64,
    pub ray_singer: f64,
    pub im_eta: f64,
    pub theta: CutAngle,
    /// `|LDet_gr - (ξ - iπη)|`.
    pub residual: f64,
}

/// The cut used for a model: `θ ∈ (-π/2, -π/4]` leaving `L_(-π/2, θ]` and
/// `L_(π/2, θ+π]` free of eigenvalues.
pub fn model_cut(model: &CircleModel) -> Result<CutAngle> {
    det_eta_angle(&model.spectrum()?)
}

/// `T(∇) = Det_θ(B_even)`, the only surviving term of the graded determinant
/// on the circle.
pub fn torsion(model: &CircleModel) -> Result<Complex64> {
    let spec = model.spectrum()?;
    Ok(ldet(&spec, det_eta_angle(&spec)?)?.det)
}

pub fn refined_torsion(model: &CircleModel) -> Result<TorsionReport> {
    let spec = model.spectrum()?;
    let theta = det_eta_angle(&spec)?;
    let graded_ldet = ldet(&spec, theta)?.ldet;
    let cut = theta.doubled();
    let mut xi = Complex64::new(0.0, 0.0);
    let mut eta = Complex64::new(0.0, 0.0);
    for p in &model.params {
        xi += 0.5 * ldet(&Spectrum::quad_lattice(p.a, p.multiplicity)?, cut)?.ldet;
        eta += eta_invariant(&Spectrum::lattice(p.a, p.multiplicity)?)?;
    }
    let ray_singer = ray_singer_torsion(model)?;
    Ok(TorsionReport {
        torsion: graded_ldet.exp(),
        xi,
        eta,
        graded_ldet,
        ray_singer,
        im_eta: eta.im,
        theta,
        residual: (graded_ldet - (xi - Complex64::i() * PI * eta)).norm(),
    })
}

/// Torsions of the rank-one summands, one per log-parameter (repeated by multiplicity).
pub fn rank1_torsions(model: &CircleModel) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for p in &model.params {
        let t = torsion(&build_rank1(p.a)?)?;
        out.extend(std::iter::repeat_n(t, p.multiplicity as usize));
    }
    Ok(out)
}

/// `T^RS = exp(½ LDet_{-π}(Δ))` with `Δ` the Laplacian on one-forms, whose
/// spectrum equals that on functions for an acyclic connection.
pub fn ray_singer_torsion(model: &CircleModel) -> Result<f64> {
    let l = ldet(&model.laplace_spectrum()?, CutAngle::new(-PI))?.ldet;
    Ok((0.5 * l.re).exp())
}

/// Residuals of `log(|T|/T^RS) = π Im η` and `|T| = T^RS e^{π Im η}`, and of
/// the comparison with `π Im Arg`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrsReport {
    pub abs_torsion: f64,
    pub ray_singer: f64,
    pub im_eta: f64,
    pub log_ratio: f64,
    /// `|log(|T|/T^RS) - π Im η|`.
    pub log_residual: f64,
    /// `||T| - T^RS e^{π Im η}| / T^RS`.
    pub modulus_residual: f64,
    #[serde(with = "crate::serde_complex")]
    pub arg: Complex64,
    /// `|π Im η - ARG_ETA_SIGN · π Im Arg|`.
    pub arg_residual: f64,
}

pub fn trs_comparison(model: &CircleModel) -> Result<TrsReport> {
    let report = refined_torsion(model)?;
    Ok(trs_from_report(model, &report))
}

pub(crate) fn trs_from_report(model: &CircleModel, report: &TorsionReport) -> TrsReport {
    let abs_torsion = report.torsion.norm();
    let log_ratio = (abs_torsion / report.ray_singer).ln();
    let predicted = PI * report.im_eta;
    let arg = arg_class(&DMatrix::from_element(1, 1, model.det_parallel_transport()));
    TrsReport {
        abs_torsion,
        ray_singer: report.ray_singer,
        im_eta: report.im_eta,
        log_ratio,
        log_residual: (log_ratio - predicted).abs(),
        modulus_residual: (abs_torsion - report.ray_singer * predicted.exp()).abs() / report.ray_singer,
        arg,
        arg_residual: (predicted - ARG_ETA_SIGN * PI * arg.im).abs(),
    }
}
