//! Logarithms and complex powers along a spectral cut.
//!
//! A cut at angle `θ` removes the ray `R_θ = {ρ e^{iθ} : ρ ≥ 0}` from the
//! plane. On the remaining slit plane the logarithm `log_θ` is the branch
//! with `θ < Im log_θ(λ) < θ + 2π`, and `λ^{-s}_θ = e^{-s log_θ λ}`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Direction of a spectral cut.
///
/// The angle is kept as given and as a key reduced into `[-2π, 2π)`.
/// Angles differing by `4π` compare equal; `θ` and `θ + 2π` do not, since
/// they select logarithm branches that differ by `2πi`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct CutAngle {
    given: f64,
    normalized: f64,
}

impl CutAngle {
    pub fn new(theta: f64) -> Self {
        let normalized = (theta + TAU).rem_euclid(2.0 * TAU) - TAU;
        CutAngle {
            given: theta,
            normalized,
        }
    }

    /// The normalized angle in `[-2π, 2π)`.
    pub fn radians(self) -> f64 {
        self.normalized
    }

    /// The angle as originally supplied.
    pub fn given(self) -> f64 {
        self.given
    }

    /// Cut turned counterclockwise by `delta` radians.
    pub fn rotated(self, delta: f64) -> Self {
        CutAngle::new(self.given + delta)
    }

    /// `2θ`, the cut used for the square of an operator.
    pub fn doubled(self) -> Self {
        CutAngle::new(2.0 * self.given)
    }
}

impl PartialEq for CutAngle {
    fn eq(&self, other: &Self) -> bool {
        self.normalized == other.normalized
    }
}

impl From<f64> for CutAngle {
    fn from(theta: f64) -> Self {
        CutAngle::new(theta)
    }
}

impl From<CutAngle> for f64 {
    fn from(theta: CutAngle) -> Self {
        theta.given
    }
}

/// Counterclockwise angle from the ray `R_θ` to `lambda`, in `[0, 2π)`.
pub fn angular_offset(lambda: Complex64, theta: CutAngle) -> f64 {
    let d = (lambda.arg() - theta.radians()).rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π
    if d >= TAU {
        0.0
    } else {
        d
    }
}

/// Angular distance between the direction of `lambda` and the ray `R_θ`.
pub fn angular_distance(lambda: Complex64, theta: CutAngle) -> f64 {
    let d = angular_offset(lambda, theta);
    d.min(TAU - d)
}

/// `log_θ(λ)` with the default (exact) on-cut policy.
pub fn log_cut(lambda: Complex64, theta: CutAngle) -> Result<Complex64> {
    log_cut_with_tolerance(lambda, theta, 0.0)
}

/// `log_θ(λ)`, rejecting `λ` whose direction is within `tol` radians of `R_θ`.
pub fn log_cut_with_tolerance(lambda: Complex64, theta: CutAngle, tol: f64) -> Result<Complex64> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroInput);
    }
    let offset = angular_offset(lambda, theta);
    if offset <= tol || TAU - offset <= tol {
        return Err(Error::OnCut {
            value: lambda,
            theta: theta.given(),
        });
    }
    let principal = lambda.arg();
    let turns = ((theta.radians() + offset - principal) / TAU).round();
    Ok(Complex64::new(lambda.norm().ln(), principal + turns * TAU))
}

/// `λ^{-s}_θ = e^{-s log_θ λ}`.
pub fn pow_cut(lambda: Complex64, s: Complex64, theta: CutAngle) -> Result<Complex64> {
    Ok((-s * log_cut(lambda, theta)?).exp())
}

/// Solid angle `L_I = {ρ e^{iφ} : ρ > 0, φ ∈ I}` for an interval `I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Sector {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Sector {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if !(lo < hi && hi - lo <= TAU) {
            return Err(Error::InvalidInput(format!(
                "sector bounds must satisfy lo < hi <= lo + 2π, got ({lo}, {hi})"
            )));
        }
        Ok(Sector {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    /// `L_(lo, hi)`.
    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Sector::new(lo, hi, false, false)
    }

    /// `L_[lo, hi]`.
    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Sector::new(lo, hi, true, true)
    }

    /// `L_(lo, hi]`.
    pub fn left_open(lo: f64, hi: f64) -> Result<Self> {
        Sector::new(lo, hi, false, true)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl std::fmt::Display for Sector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "L{}{:.6}, {:.6}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

pub fn in_sector(lambda: Complex64, sector: &Sector) -> bool {
    if lambda == Complex64::new(0.0, 0.0) {
        return false;
    }
    let width = sector.width();
    let mut d = (lambda.arg() - sector.lo).rem_euclid(TAU);
    if d >= TAU {
        d = 0.0;
    }
    if d == 0.0 {
        // at the lower ray; for a full turn this is also the upper ray
        return sector.lo_closed || (width >= TAU && sector.hi_closed);
    }
    if d < width {
        true
    } else {
        d == width && sector.hi_closed
    }
}

/// Principal-branch angle helper used when enumerating branches.
pub(crate) fn branch_turns_for(direction: f64, theta: CutAngle) -> Option<f64> {
    // smallest φ = direction + 2πk with θ < φ < θ + 2π
    let lo = theta.radians();
    let k = ((lo - direction) / TAU).floor() + 1.0;
    let phi = direction + k * TAU;
    if phi <= lo || phi >= lo + TAU {
        None
    } else {
        Some(phi)
    }
}
