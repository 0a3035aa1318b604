//! Zeta-regularized determinants and the identities relating them to the
//! eta invariant.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexcut::CutAngle;
use crate::error::{Error, Result};
use crate::spectrum::{
    check_det_eta_hypothesis, eigenvalues_off_tail_cone, imaginary_axis_counts,
    is_symmetric_about_real_axis, negate_spectrum, square_spectrum, GradedSpectrum, Spectrum,
};
use crate::tolerances;
use crate::zetafun::{eta_invariant, zeta_at_zero, zeta_ds_at_zero};

/// `LDet_θ(D) = -ζ'_θ(0, D)` and `Det_θ(D) = e^{LDet_θ(D)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LDetResult {
    #[serde(with = "crate::serde_complex")]
    pub ldet: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub det: Complex64,
    pub theta: CutAngle,
}

impl LDetResult {
    fn from_ldet(ldet: Complex64, theta: CutAngle) -> Self {
        LDetResult {
            ldet,
            det: ldet.exp(),
            theta,
        }
    }
}

pub fn ldet(spec: &Spectrum, theta: CutAngle) -> Result<LDetResult> {
    Ok(LDetResult::from_ldet(-zeta_ds_at_zero(spec, theta)?, theta))
}

/// `LDet_θ(D|_V)` for a restriction given by reduced multiplicities.
pub fn ldet_restricted(spec: &Spectrum, theta: CutAngle) -> Result<LDetResult> {
    match spec {
        Spectrum::Restricted { .. } => ldet(spec, theta),
        _ => Err(Error::InvalidInput("expected a restricted spectrum".into())),
    }
}

/// `Σ_j (-1)^j LDet_θ((-1)^j D_j)`.
pub fn graded_ldet(gspec: &GradedSpectrum, theta: CutAngle) -> Result<LDetResult> {
    gspec.validate()?;
    let mut total = Complex64::new(0.0, 0.0);
    for (index, comp) in gspec.components.iter().enumerate() {
        let odd = comp.parity % 2 == 1;
        let spec = if odd {
            negate_spectrum(&comp.spectrum)
        } else {
            comp.spectrum.clone()
        };
        let part = ldet(&spec, theta).map_err(|e| match e {
            Error::NotAgmon { .. } => Error::ComponentNotAgmon {
                index,
                parity: comp.parity,
                source: Box::new(e),
            },
            other => other,
        })?;
        if odd {
            total -= part.ldet;
        } else {
            total += part.ldet;
        }
    }
    Ok(LDetResult::from_ldet(total, theta))
}

/// Both sides of `LDet_θ(D) = ½ LDet_{2θ}(D²) ∓ iπ (η(D) - ½ ζ_{2θ}(0, D²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DetEtaReport {
    #[serde(with = "crate::serde_complex")]
    pub lhs: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub rhs_half_square: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub eta: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub zeta_zero_square: Complex64,
    pub residual: f64,
    pub theta: CutAngle,
    /// True for the variant with the cut along `R_{θ+π}`.
    pub upper: bool,
}

impl DetEtaReport {
    /// The right-hand side of the identity.
    pub fn rhs(&self) -> Complex64 {
        let sign = if self.upper { 1.0 } else { -1.0 };
        self.rhs_half_square + sign * Complex64::i() * PI * (self.eta - 0.5 * self.zeta_zero_square)
    }

    fn finish(mut self) -> Self {
        self.residual = (self.lhs - self.rhs()).norm();
        self
    }
}

/// Right-hand side ingredients computed from `D²` and `η(D)` only.
fn square_side(spec: &Spectrum, theta: CutAngle) -> Result<(Complex64, Complex64, Complex64)> {
    let square = square_spectrum(spec)?;
    let cut = theta.doubled();
    let half = 0.5 * ldet(&square, cut)?.ldet;
    let zeta0 = zeta_at_zero(&square, cut)?;
    let eta = eta_invariant(spec)?;
    Ok((half, eta, zeta0))
}

/// `LDet_θ(D) = ½ LDet_{2θ}(D²) - iπ (η(D) - ½ ζ_{2θ}(0, D²))`, after checking
/// that `L_(-π/2, θ]` and `L_(π/2, θ+π]` hold no eigenvalues.
pub fn verify_det_eta(spec: &Spectrum, theta: CutAngle) -> Result<DetEtaReport> {
    check_det_eta_hypothesis(spec, theta)?;
    det_eta_unchecked(spec, theta, false)
}

/// The variant with the spectral cut along `R_{θ+π}`:
/// `LDet_{θ+π}(D) = ½ LDet_{2θ}(D²) + iπ (η(D) - ½ ζ_{2θ}(0, D²))`.
///
/// The logarithm on the left takes arguments in `(θ-π, θ+π)`, the branch
/// continuous with `log_θ` across the right half plane.
pub fn verify_det_eta_upper(spec: &Spectrum, theta: CutAngle) -> Result<DetEtaReport> {
    check_det_eta_hypothesis(spec, theta)?;
    det_eta_unchecked(spec, theta, true)
}

fn det_eta_unchecked(spec: &Spectrum, theta: CutAngle, upper: bool) -> Result<DetEtaReport> {
    let lhs_cut = if upper { theta.rotated(-PI) } else { theta };
    let lhs = ldet(spec, lhs_cut)?.ldet;
    let (rhs_half_square, eta, zeta_zero_square) = square_side(spec, theta)?;
    Ok(DetEtaReport {
        lhs,
        rhs_half_square,
        eta,
        zeta_zero_square,
        residual: 0.0,
        theta,
        upper,
    }
    .finish())
}

/// Outcome of comparing `Det_θ(D)` with the det/eta right-hand side without
/// the sector hypothesis; the two may then differ by a sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DetEtaSignReport {
    pub report: DetEtaReport,
    /// `Det_θ(D) / exp(rhs)`.
    #[serde(with = "crate::serde_complex")]
    pub ratio: Complex64,
    /// `+1` or `-1` when the ratio is that sign to tolerance, otherwise absent.
    pub sign: Option<i8>,
    pub hypothesis_holds: bool,
}

/// Evaluate the det/eta identity for any `θ ∈ (-π, 0)` Agmon for `D` and `2θ`
/// Agmon for `D²`, reporting the observed sign instead of failing when the
/// sector hypothesis does not hold.
pub fn det_eta_sign(spec: &Spectrum, theta: CutAngle) -> Result<DetEtaSignReport> {
    let t = theta.radians();
    if !(t > -PI && t < 0.0) {
        return Err(Error::InvalidInput(format!(
            "cut angle must lie in (-π, 0), got {}",
            theta.given()
        )));
    }
    let hypothesis_holds = check_det_eta_hypothesis(spec, theta).is_ok();
    let report = det_eta_unchecked(spec, theta, false)?;
    let ratio = (report.lhs - report.rhs()).exp();
    let tol = tolerances::IDENTITY;
    let sign = if (ratio - 1.0).norm() < tol {
        Some(1)
    } else if (ratio + 1.0).norm() < tol {
        Some(-1)
    } else {
        None
    };
    Ok(DetEtaSignReport {
        report,
        ratio,
        sign,
        hypothesis_holds,
    })
}

/// Moving the cut from `θ1` to `θ2` across `count` eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AngleShiftReport {
    /// Eigenvalues (with multiplicity) swept between the two rays.
    pub count: u64,
    /// `LDet_{θ2}(D) - LDet_{θ1}(D) = 2πi · shift`.
    pub shift: i64,
    #[serde(with = "crate::serde_complex")]
    pub ldet1: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub ldet2: Complex64,
    /// `|LDet_{θ2} - LDet_{θ1} - 2πi · shift|`.
    pub ldet_residual: f64,
    /// `|Det_{θ2} - Det_{θ1}| / max(1, |Det_{θ1}|)`.
    pub det_residual: f64,
}

/// Count the eigenvalues in `L_[θ1, θ2]` and compare determinants taken with
/// the two cuts.
pub fn angle_shift_count(spec: &Spectrum, theta1: CutAngle, theta2: CutAngle) -> Result<AngleShiftReport> {
    let (t1, t2) = (theta1.radians(), theta2.radians());
    let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    // distance from each tail direction to the swept interval
    let mut gap = f64::INFINITY;
    for dir in spec.tail_directions()? {
        let first = dir + ((lo - dir) / TAU).ceil() * TAU;
        if first <= hi {
            return Err(Error::InfiniteCrossing {
                theta1: theta1.given(),
                theta2: theta2.given(),
            });
        }
        let below = first - TAU;
        gap = gap.min(first - hi).min(lo - below);
    }
    let mut count = 0u64;
    for (v, m) in eigenvalues_off_tail_cone(spec, gap)? {
        let phi = v.arg();
        let mut k = phi + ((lo - phi) / TAU).ceil() * TAU;
        while k <= hi {
            count += m as u64;
            k += TAU;
        }
    }
    let ldet1 = ldet(spec, theta1)?;
    let ldet2 = ldet(spec, theta2)?;
    let shift = if t1 <= t2 { count as i64 } else { -(count as i64) };
    let expected = Complex64::new(0.0, TAU * shift as f64);
    Ok(AngleShiftReport {
        count,
        shift,
        ldet1: ldet1.ldet,
        ldet2: ldet2.ldet,
        ldet_residual: (ldet2.ldet - ldet1.ldet - expected).norm(),
        det_residual: (ldet2.det - ldet1.det).norm() / ldet1.det.norm().max(1.0),
    })
}

/// The factored determinant of an operator whose spectrum is symmetric
/// about the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RealCoefReport {
    pub ldet: LDetResult,
    /// `(-1)^{m_-} √|Det_{2θ}(D²)| e^{-iπ(η - ½ζ_{2θ}(0, D²))}`.
    #[serde(with = "crate::serde_complex")]
    pub factored: Complex64,
    pub m_minus: u64,
    pub eta: f64,
    pub zeta_zero_square: f64,
    /// `Det_{2θ}(D²)`, real for symmetric spectra.
    pub det_square: f64,
    /// `|Det_θ(D) - factored| / max(1, |Det_θ(D)|)`.
    pub residual: f64,
}

fn real_part_checked(z: Complex64, quantity: &'static str, tol: f64) -> Result<f64> {
    if z.im.abs() > tol {
        return Err(Error::RealityViolated {
            quantity,
            imag: z.im,
        });
    }
    Ok(z.re)
}

/// `Det_θ(D) = (-1)^{m_-} √|Det_{2θ}(D²)| e^{-iπ(η(D) - ½ζ_{2θ}(0, D²))}` for
/// spectra symmetric about the real axis and `θ ∈ (-π/2, 0)`, after checking
/// that `η(D)`, `ζ_{2θ}(0, D²)` and `Det_{2θ}(D²)` are real.
pub fn symmetric_spectrum_det(spec: &Spectrum, theta: CutAngle) -> Result<RealCoefReport> {
    symmetric_spectrum_det_with_tolerance(spec, theta, tolerances::REALITY)
}

pub fn symmetric_spectrum_det_with_tolerance(
    spec: &Spectrum,
    theta: CutAngle,
    reality_tol: f64,
) -> Result<RealCoefReport> {
    let t = theta.radians();
    if !(t > -PI / 2.0 && t < 0.0) {
        return Err(Error::InvalidInput(format!(
            "cut angle must lie in (-π/2, 0), got {}",
            theta.given()
        )));
    }
    if !is_symmetric_about_real_axis(spec) {
        return Err(Error::NotSymmetric);
    }
    let det = ldet(spec, theta)?;
    let square = square_spectrum(spec)?;
    let cut = theta.doubled();
    let eta = real_part_checked(eta_invariant(spec)?, "eta invariant", reality_tol)?;
    let zeta0 = real_part_checked(zeta_at_zero(&square, cut)?, "zeta(0) of the square", reality_tol)?;
    // Det_{2θ}(D²) = e^{-ζ'}: real exactly when Im ζ' ∈ πℤ
    let dz = zeta_ds_at_zero(&square, cut)?;
    let turns = dz.im / PI;
    real_part_checked(
        Complex64::new(0.0, PI * (turns - turns.round())),
        "determinant of the square",
        reality_tol * (1.0 + dz.norm()),
    )?;
    let det_square = (-dz.re).exp() * if (turns.round() as i64) % 2 == 0 { 1.0 } else { -1.0 };
    let (_, m_minus) = imaginary_axis_counts(spec)?;
    let sign = if m_minus % 2 == 0 { 1.0 } else { -1.0 };
    let factored = sign * det_square.abs().sqrt() * (-Complex64::i() * PI * (eta - 0.5 * zeta0)).exp();
    let residual = (det.det - factored).norm() / det.det.norm().max(1.0);
    Ok(RealCoefReport {
        ldet: det,
        factored,
        m_minus,
        eta,
        zeta_zero_square: zeta0,
        det_square,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn finite(pairs: &[(Complex64, u32)]) -> Spectrum {
        Spectrum::from_pairs(pairs).unwrap()
    }

    #[test]
    fn ldet_examples() {
        let r = ldet(&finite(&[(c(2.0, 0.0), 1)]), CutAngle::new(-PI)).unwrap();
        assert!((r.ldet - c(2f64.ln(), 0.0)).norm() < 1e-15);
        assert!((r.det - c(2.0, 0.0)).norm() < 1e-15);
        let r = ldet(&finite(&[(c(0.0, 1.0), 1)]), CutAngle::new(-FRAC_PI_2)).unwrap();
        assert!((r.ldet - c(0.0, FRAC_PI_2)).norm() < 1e-15);
        let r = ldet(&Spectrum::lattice(c(0.5, 0.0), 1).unwrap(), CutAngle::new(-FRAC_PI_2)).unwrap();
        assert!((r.det - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn restricted_examples() {
        let base = finite(&[(c(2.0, 0.0), 2)]);
        let th = CutAngle::new(-PI);
        let r = ldet_restricted(&Spectrum::restricted(base.clone(), BTreeMap::new()).unwrap(), th).unwrap();
        assert_eq!(r, ldet(&base, th).unwrap());
        let r = ldet_restricted(&Spectrum::restricted(base, BTreeMap::from([(0, 1)])).unwrap(), th).unwrap();
        assert!((r.det - c(2.0, 0.0)).norm() < 1e-15);
        let base = finite(&[(c(2.0, 0.0), 2), (c(3.0, 0.0), 1)]);
        let r = ldet_restricted(&Spectrum::restricted(base, BTreeMap::from([(0, 0), (1, 1)])).unwrap(), th).unwrap();
        assert!((r.det - c(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn graded_examples() {
        let two = finite(&[(c(2.0, 0.0), 1)]);
        let g = GradedSpectrum::new(vec![(0, two.clone())]).unwrap();
        assert!((graded_ldet(&g, CutAngle::new(-PI)).unwrap().det - c(2.0, 0.0)).norm() < 1e-15);
        let g = GradedSpectrum::new(vec![(0, two.clone()), (1, two)]).unwrap();
        let r = graded_ldet(&g, CutAngle::new(-FRAC_PI_2)).unwrap();
        assert!((r.ldet - c(0.0, -PI)).norm() < 1e-15);
        assert!((r.det + 1.0).norm() < 1e-15);
        let bad = GradedSpectrum::new(vec![(0, finite(&[(c(0.0, -1.0), 1)]))]).unwrap();
        assert!(matches!(
            graded_ldet(&bad, CutAngle::new(-FRAC_PI_2)),
            Err(Error::ComponentNotAgmon { index: 0, parity: 0, .. })
        ));
    }

    #[test]
    fn det_eta_examples() {
        let th = CutAngle::new(-FRAC_PI_4);
        let pm = finite(&[(c(0.0, 1.0), 1), (c(0.0, -1.0), 1)]);
        let r = verify_det_eta(&pm, th).unwrap();
        assert!((r.lhs - c(0.0, TAU)).norm() < 1e-14);
        assert!(r.residual < 1e-14);
        let one = finite(&[(c(1.0, 0.0), 1)]);
        let r = verify_det_eta(&one, th).unwrap();
        assert!(r.lhs.norm() < 1e-15 && r.residual < 1e-15);
        let lat = Spectrum::lattice(c(0.25, 0.0), 1).unwrap();
        assert!(verify_det_eta(&lat, th).unwrap().residual < 1e-9);
        let witness = finite(&[(c(1.0, -2.0), 1)]);
        assert!(matches!(verify_det_eta(&witness, th), Err(Error::HypothesisViolated { .. })));
    }

    #[test]
    fn det_eta_upper_examples() {
        let th = CutAngle::new(-FRAC_PI_4);
        for spec in [
            finite(&[(c(1.0, 0.0), 1)]),
            finite(&[(c(0.0, 1.0), 1), (c(0.0, -1.0), 1)]),
            Spectrum::lattice(c(0.25, 0.0), 1).unwrap(),
        ] {
            let r = verify_det_eta_upper(&spec, th).unwrap();
            assert!(r.residual < 1e-9, "{spec:?}: {r:?}");
        }
    }

    #[test]
    fn sign_flag_reports_discrepancy() {
        let th = CutAngle::new(-FRAC_PI_4);
        let witness = finite(&[(c(1.0, -2.0), 1)]);
        let r = det_eta_sign(&witness, th).unwrap();
        assert!(!r.hypothesis_holds);
        assert!(r.sign.is_some());
    }

    #[test]
    fn angle_shift_examples() {
        let r = angle_shift_count(
            &finite(&[(c(0.0, 1.0), 2)]),
            CutAngle::new(-FRAC_PI_4),
            CutAngle::new(3.0 * FRAC_PI_4),
        )
        .unwrap();
        assert_eq!((r.count, r.shift), (2, 2));
        assert!(r.ldet_residual < 1e-14 && r.det_residual < 1e-14);
        let r = angle_shift_count(
            &finite(&[(c(1.0, 0.0), 1)]),
            CutAngle::new(-FRAC_PI_4),
            CutAngle::new(-PI / 3.0),
        )
        .unwrap();
        assert_eq!(r.count, 0);
        let lat = Spectrum::lattice(c(0.5, 0.0), 1).unwrap();
        let r = angle_shift_count(&lat, CutAngle::new(-FRAC_PI_4), CutAngle::new(-3.0 * FRAC_PI_4)).unwrap();
        assert_eq!(r.count, 0);
        assert!(r.det_residual < 1e-10 && r.ldet_residual < 1e-10);
        assert!(matches!(
            angle_shift_count(&lat, CutAngle::new(-FRAC_PI_4), CutAngle::new(FRAC_PI_4)),
            Err(Error::InfiniteCrossing { .. })
        ));
    }

    #[test]
    fn realcoef_examples() {
        let th = CutAngle::new(-FRAC_PI_4);
        for (spec, m_minus) in [
            (finite(&[(c(1.0, 0.0), 1), (c(-2.0, 0.0), 1)]), 0),
            (finite(&[(c(0.0, 1.0), 1), (c(0.0, -1.0), 1)]), 1),
            (finite(&[(c(1.0, 1.0), 1), (c(1.0, -1.0), 1)]), 0),
        ] {
            let r = symmetric_spectrum_det(&spec, CutAngle::new(-1.2)).unwrap();
            assert_eq!(r.m_minus, m_minus);
            assert!(r.residual < 1e-10, "{spec:?}: {r:?}");
            let r = symmetric_spectrum_det(&spec, th);
            if let Ok(r) = r {
                assert!(r.residual < 1e-10, "{spec:?}: {r:?}");
            }
        }
        assert_eq!(
            symmetric_spectrum_det(&finite(&[(c(1.0, 1.0), 1)]), th),
            Err(Error::NotSymmetric)
        );
    }
}
