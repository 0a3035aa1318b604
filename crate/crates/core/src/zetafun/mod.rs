//! Spectral zeta and eta functions.
//!
//! Finite spectra are summed term by term. Lattice families contribute a
//! finite window of explicit terms plus two tails, each of which is a
//! branch phase times a Hurwitz zeta function.

pub mod kernel;

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::complexcut::{log_cut, CutAngle};
use crate::error::{Error, Result};
use crate::spectrum::{imaginary_axis_counts, is_imaginary, Block, FamilyKind, Spectrum, SplitMode, Tail};

pub use kernel::{hurwitz_zeta, hurwitz_zeta_ds0, ln_gamma, ZetaResult, EM_ORDER};

/// Relative size below which the binomial series of a Hermitian tail stops.
const SERIES_CUTOFF: f64 = 1e-18;
const SERIES_MAX_TERMS: usize = 200;

fn on_cut_as_agmon(err: Error) -> Error {
    match err {
        Error::OnCut { value, theta } => Error::NotAgmon {
            witness: value,
            theta,
        },
        other => other,
    }
}

/// `log_θ λ`, reporting a cut hit as a failed Agmon condition.
fn log_checked(lambda: Complex64, theta: CutAngle) -> Result<Complex64> {
    log_cut(lambda, theta).map_err(on_cut_as_agmon)
}

fn kernel_at(s: Complex64, q: Complex64, pole: Complex64) -> Result<ZetaResult> {
    hurwitz_zeta(s, q).map_err(|e| match e {
        Error::PoleAtOne => Error::PoleAt(pole),
        other => other,
    })
}

/// `G(s) = Σ_j w_j^{-s}` for the tail `w_j = (q+j)` or `(q+j)²` or `|q+j|²`.
fn tail_series(tail: &Tail, s: Complex64) -> Result<ZetaResult> {
    match tail.kind {
        FamilyKind::Linear => kernel_at(s, tail.q, s),
        FamilyKind::Square => kernel_at(2.0 * s, tail.q, s),
        FamilyKind::HermSquare => {
            // |q+j|^{-2s} = (α+j)^{-2s} Σ_k C(-s,k) β^{2k} (α+j)^{-2k}
            let alpha = Complex64::new(tail.q.re, 0.0);
            let beta2 = tail.q.im * tail.q.im;
            let mut coeff = Complex64::new(1.0, 0.0);
            let mut total = ZetaResult::exact(Complex64::new(0.0, 0.0));
            for k in 0..SERIES_MAX_TERMS {
                if k > 0 {
                    coeff *= (-s - (k - 1) as f64) / k as f64 * beta2;
                }
                if coeff == Complex64::new(0.0, 0.0) {
                    break;
                }
                let z = kernel_at(2.0 * s + 2.0 * k as f64, alpha, s)?;
                let term = coeff * z.value;
                total.value += term;
                total.error_estimate += coeff.norm() * z.error_estimate;
                if k > 0 && term.norm() <= SERIES_CUTOFF * total.value.norm().max(1e-300) {
                    break;
                }
            }
            Ok(total)
        }
    }
}

/// `G'(0)` for a tail, through log-gamma rather than numerical differentiation.
fn tail_series_ds0(tail: &Tail) -> Result<Complex64> {
    match tail.kind {
        FamilyKind::Linear => hurwitz_zeta_ds0(tail.q),
        FamilyKind::Square => Ok(2.0 * hurwitz_zeta_ds0(tail.q)?),
        FamilyKind::HermSquare => {
            let alpha = Complex64::new(tail.q.re, 0.0);
            let beta2 = tail.q.im * tail.q.im;
            let mut total = 2.0 * hurwitz_zeta_ds0(alpha)?;
            let mut power = 1.0;
            for k in 1..SERIES_MAX_TERMS {
                power *= beta2;
                if power == 0.0 {
                    break;
                }
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let term = sign / k as f64 * power * hurwitz_zeta(Complex64::new(2.0 * k as f64, 0.0), alpha)?.value;
                total += term;
                if term.norm() <= SERIES_CUTOFF * total.norm().max(1e-300) {
                    break;
                }
            }
            Ok(total)
        }
    }
}

fn tail_prefactor(tail: &Tail, s: Complex64) -> Complex64 {
    tail.weight * tail.mu as f64 * (-Complex64::i() * s * tail.phase).exp()
}

/// Explicit eigenvalues and tails of a whole spectrum.
fn decompose(spec: &Spectrum, theta: CutAngle, mode: SplitMode) -> Result<(Vec<(Complex64, u32)>, Vec<Tail>)> {
    let mut explicit = Vec::new();
    let mut tails = Vec::new();
    for block in spec.blocks()? {
        match block {
            Block::Point(v, m) => explicit.push((v, m)),
            Block::Family(f) => {
                let split = f.split(Some(theta), mode, 0)?;
                explicit.extend(split.explicit);
                tails.extend(split.tails);
            }
        }
    }
    Ok((explicit, tails))
}

/// `ζ_θ(s, D) = Σ m_k (λ_k)_θ^{-s}`, continued in `s`.
pub fn spectral_zeta(spec: &Spectrum, theta: CutAngle, s: Complex64) -> Result<ZetaResult> {
    let (explicit, tails) = decompose(spec, theta, SplitMode::Zeta)?;
    let mut out = ZetaResult::exact(Complex64::new(0.0, 0.0));
    for (v, m) in explicit {
        out.value += m as f64 * (-s * log_checked(v, theta)?).exp();
    }
    for tail in &tails {
        let g = tail_series(tail, s)?;
        let pre = tail_prefactor(tail, s);
        out.value += pre * g.value;
        out.error_estimate += pre.norm() * g.error_estimate;
    }
    Ok(out)
}

/// `ζ_θ(0, D)`.
pub fn zeta_at_zero(spec: &Spectrum, theta: CutAngle) -> Result<Complex64> {
    Ok(spectral_zeta(spec, theta, Complex64::new(0.0, 0.0))?.value)
}

/// `ζ'_θ(0, D)`, so that `LDet_θ(D) = -ζ'_θ(0, D)`.
pub fn zeta_ds_at_zero(spec: &Spectrum, theta: CutAngle) -> Result<Complex64> {
    let (explicit, tails) = decompose(spec, theta, SplitMode::Zeta)?;
    let mut out = Complex64::new(0.0, 0.0);
    for (v, m) in explicit {
        out -= m as f64 * log_checked(v, theta)?;
    }
    for tail in &tails {
        let g0 = tail_series(tail, Complex64::new(0.0, 0.0))?.value;
        let dg0 = tail_series_ds0(tail)?;
        out += tail.weight * tail.mu as f64 * (-Complex64::i() * tail.phase * g0 + dg0);
    }
    Ok(out)
}

/// `η_θ(s, D) = Σ_{Re λ>0} m_k λ_θ^{-s} - Σ_{Re λ<0} m_k (-λ)_θ^{-s}`.
/// Eigenvalues within `1e-12` of the imaginary axis are left out.
pub fn eta_function(spec: &Spectrum, theta: CutAngle, s: Complex64) -> Result<Complex64> {
    let (explicit, tails) = decompose(spec, theta, SplitMode::Eta)?;
    let mut out = Complex64::new(0.0, 0.0);
    for (v, m) in explicit {
        if is_imaginary(v) {
            continue;
        }
        if v.re > 0.0 {
            out += m as f64 * (-s * log_checked(v, theta)?).exp();
        } else {
            out -= m as f64 * (-s * log_checked(-v, theta)?).exp();
        }
    }
    for tail in &tails {
        out += tail_prefactor(tail, s) * tail_series(tail, s)?.value;
    }
    Ok(out)
}

/// Cut used for the eta invariant: every `±λ` with positive real part is
/// off the negative imaginary axis.
fn eta_cut() -> CutAngle {
    CutAngle::new(-FRAC_PI_2)
}

/// `η(D) = (η_θ(0, D) + m_+ - m_-) / 2`.
pub fn eta_invariant(spec: &Spectrum) -> Result<Complex64> {
    eta_invariant_at(spec, eta_cut())
}

/// The eta invariant evaluated with an explicit cut angle.
pub fn eta_invariant_at(spec: &Spectrum, theta: CutAngle) -> Result<Complex64> {
    let eta0 = eta_function(spec, theta, Complex64::new(0.0, 0.0))?;
    let (plus, minus) = imaginary_axis_counts(spec)?;
    Ok(0.5 * (eta0 + plus as f64 - minus as f64))
}

/// Eta invariant of a restriction `D|_V`, with the reduced multiplicities
/// entering both the eta function and the imaginary-axis counts.
pub fn eta_invariant_restricted(spec: &Spectrum) -> Result<Complex64> {
    match spec {
        Spectrum::Restricted { .. } => eta_invariant(spec),
        _ => Err(Error::InvalidInput("expected a restricted spectrum".into())),
    }
}
