//! Variation formulas and the holomorphy of the torsion in `a`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::monodromy::{arg_class, monodromy, ConnectionFamily};
use super::{build_from_log_params, build_rank1, torsion, LogParam};
use crate::error::{Error, Result};
use crate::zetafun::eta_invariant;

/// Difference of two classes in `ℂ/ℤ`, with real part in `[-½, ½)`.
fn mod_z_difference(a: Complex64, b: Complex64) -> Complex64 {
    let d = a - b;
    Complex64::new(d.re - d.re.round(), d.im)
}

/// `∫_0^{2π} Tr ψ_t(x) dx` by the periodic trapezoid rule.
fn trace_integral(family: &ConnectionFamily, t: f64, points: usize) -> Complex64 {
    let h = TAU / points as f64;
    let sum: Complex64 = (0..points).map(|k| family.derivative_at(t, k as f64 * h).trace()).sum();
    sum * h
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ArgDerivativeReport {
    /// Central difference of `Arg` of `Φ_t(2π)`.
    #[serde(with = "crate::serde_complex")]
    pub derivative: Complex64,
    /// `-(1/2πi) ∫ Tr ψ_t dx`.
    #[serde(with = "crate::serde_complex")]
    pub predicted: Complex64,
    pub residual: f64,
}

/// Compare `d/dt Arg_{∇_t}` with `-(1/2πi) ∫ Tr ψ_t`.
pub fn arg_derivative_check(family: &ConnectionFamily, t: f64, dt: f64, steps: usize) -> Result<ArgDerivativeReport> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let plus = arg_class(&monodromy(family, t + dt, steps)?);
    let minus = arg_class(&monodromy(family, t - dt, steps)?);
    let derivative = mod_z_difference(plus, minus) / (2.0 * dt);
    let predicted = -trace_integral(family, t, steps) / Complex64::new(0.0, TAU);
    Ok(ArgDerivativeReport {
        derivative,
        predicted,
        residual: (derivative - predicted).norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EtaVariationReport {
    /// Central difference of `η(∇_t)`.
    #[serde(with = "crate::serde_complex")]
    pub derivative: Complex64,
    /// `(i/2π) ∫ Tr ψ_t`.
    #[serde(with = "crate::serde_complex")]
    pub predicted: Complex64,
    pub residual: f64,
}

fn eta_of(params: Vec<Complex64>) -> Result<Complex64> {
    let model = build_from_log_params(params.into_iter().map(|a| LogParam { a, multiplicity: 1 }).collect())?;
    eta_invariant(&model.spectrum()?)
}

/// Compare `d/dt η(∇_{a(t)})` with `(i/2π) ∫_{S¹} Tr ψ_t`, where
/// `ψ_t = i diag(a_j'(t)) dx`. Integer jumps of `η` are discarded.
pub fn eta_variation_check<F, G>(a: F, da: G, t: f64, dt: f64) -> Result<EtaVariationReport>
where
    F: Fn(f64) -> Vec<Complex64> + Send + Sync + 'static,
    G: Fn(f64) -> Vec<Complex64> + Send + Sync + 'static,
{
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let plus = eta_of(a(t + dt))?;
    let minus = eta_of(a(t - dt))?;
    let derivative = mod_z_difference(plus, minus) / (2.0 * dt);
    let dim = a(t).len();
    let family = ConnectionFamily::diagonal_path(dim, a, da);
    let predicted = Complex64::new(0.0, 1.0 / TAU) * trace_integral(&family, t, super::monodromy::MIN_STEPS);
    Ok(EtaVariationReport {
        derivative,
        predicted,
        residual: (derivative - predicted).norm(),
    })
}

/// Axis-parallel rectangle in the `a`-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

/// Smallest distance the scan keeps between its region and the integers.
pub const REGION_MARGIN: f64 = 0.05;

/// Largest finite-difference step accepted by the scan.
pub const MAX_STEP: f64 = 1e-4;

impl Region {
    /// Distance from the rectangle to the nearest integer, and that integer.
    pub fn distance_to_integers(&self) -> (f64, i64) {
        let dy = if self.im_min <= 0.0 && 0.0 <= self.im_max {
            0.0
        } else {
            self.im_min.abs().min(self.im_max.abs())
        };
        let mut best = (f64::INFINITY, 0);
        for n in (self.re_min.floor() as i64)..=(self.re_max.ceil() as i64) {
            let x = n as f64;
            let dx = if x < self.re_min {
                self.re_min - x
            } else if x > self.re_max {
                x - self.re_max
            } else {
                0.0
            };
            let d = dx.hypot(dy);
            if d < best.0 {
                best = (d, n);
            }
        }
        best
    }

    /// Grid points in row-major order (imaginary part outer, real part inner).
    pub fn grid(&self, n: usize) -> Vec<Complex64> {
        let coord = |lo: f64, hi: f64, k: usize| {
            if n == 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        };
        (0..n)
            .flat_map(|j| (0..n).map(move |i| (i, j)))
            .map(|(i, j)| Complex64::new(coord(self.re_min, self.re_max, i), coord(self.im_min, self.im_max, j)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite());
        if !finite || self.re_min > self.re_max || self.im_min > self.im_max {
            return Err(Error::InvalidInput("region bounds must be finite and ordered".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HolomorphyPoint {
    #[serde(with = "crate::serde_complex")]
    pub a: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub torsion: Complex64,
    /// `|∂T/∂ā|` by central differences.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HolomorphyReport {
    pub max_residual: f64,
    pub max_abs_torsion: f64,
    pub points: Vec<HolomorphyPoint>,
}

/// `|∂T/∂ā|` at `a` from central differences of step `h`.
pub fn cauchy_riemann_residual(a: Complex64, h: f64) -> Result<f64> {
    let t = |z: Complex64| build_rank1(z).and_then(|m| torsion(&m));
    let dx = (t(a + h)? - t(a - h)?) / (2.0 * h);
    let dy = (t(a + Complex64::new(0.0, h))? - t(a - Complex64::new(0.0, h))?) / (2.0 * h);
    Ok((0.5 * (dx + Complex64::i() * dy)).norm())
}

/// Maximum Cauchy-Riemann residual of `a ↦ T(∇_a)` over a `grid × grid` lattice.
pub fn holomorphy_scan(region: &Region, grid: usize, h: f64) -> Result<HolomorphyReport> {
    region.validate()?;
    if !(h > 0.0 && h <= MAX_STEP) {
        return Err(Error::InvalidInput(format!("step must lie in (0, {MAX_STEP}], got {h}")));
    }
    let (dist, n) = region.distance_to_integers();
    if dist < REGION_MARGIN {
        return Err(Error::NonAcyclic(Complex64::new(n as f64, 0.0)));
    }
    let points: Vec<HolomorphyPoint> = region
        .grid(grid)
        .into_par_iter()
        .map(|a| {
            Ok(HolomorphyPoint {
                a,
                torsion: torsion(&build_rank1(a)?)?,
                residual: cauchy_riemann_residual(a, h)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(HolomorphyReport {
        max_residual: points.iter().map(|p| p.residual).fold(0.0, f64::max),
        max_abs_torsion: points.iter().map(|p| p.torsion.norm()).fold(0.0, f64::max),
        points,
    })
}
