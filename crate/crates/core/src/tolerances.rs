//! Numerical tolerances shared by the verification routines and the CLI.
//!
//! Every residual check in the crate compares against one of these
//! constants; the CLI can override them per run through [`Tolerances`].

use serde::{Deserialize, Serialize};

/// Determinant identities whose two sides go through the Hurwitz kernel.
pub const IDENTITY: f64 = 1e-9;

/// Identities between finite eigenvalue sums.
pub const FINITE_ARITHMETIC: f64 = 1e-10;

/// Hurwitz zeta and log-gamma kernel accuracy on the test grid.
pub const KERNEL: f64 = 1e-10;

/// Closed form `1 - e^{2 pi i a}` of the circle torsion, relative to `1 + |T|`.
pub const CLOSED_FORM: f64 = 1e-8;

/// Torsion comparisons that go through an eigen-decomposition.
pub const RANK_N_RELATIVE: f64 = 1e-8;

/// Ray-Singer comparisons.
pub const RAY_SINGER: f64 = 1e-6;

/// Cauchy-Riemann residual relative to the largest `|T|` on the grid.
pub const CAUCHY_RIEMANN_RELATIVE: f64 = 1e-5;

/// Finite-difference variation formulas.
pub const VARIATION: f64 = 1e-6;

/// Imaginary parts that must vanish for spectra symmetric about the real axis.
pub const REALITY: f64 = 1e-10;

/// Eigenvalues with `|Re λ|` at most this are treated as purely imaginary.
pub const IMAGINARY_AXIS: f64 = 1e-12;

/// Minimum distance of a log-parameter from the integers.
pub const ACYCLIC: f64 = 1e-8;

/// Significant digits kept when merging coinciding squared eigenvalues.
pub const MERGE_SIGNIFICANT_DIGITS: i32 = 12;

/// Run-time tolerance block, defaulting to the constants above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct Tolerances {
    pub identity: f64,
    pub finite_arithmetic: f64,
    pub closed_form: f64,
    pub ray_singer: f64,
    pub cauchy_riemann: f64,
    pub variation: f64,
    pub reality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: IDENTITY,
            finite_arithmetic: FINITE_ARITHMETIC,
            closed_form: CLOSED_FORM,
            ray_singer: RAY_SINGER,
            cauchy_riemann: CAUCHY_RIEMANN_RELATIVE,
            variation: VARIATION,
            reality: REALITY,
        }
    }
}

impl Tolerances {
    /// Apply a `name=value` override, as accepted by `--tol`.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), String> {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| format!("expected name=value, got {spec:?}"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("tolerance {name:?} is not a number"))?;
        if !(value > 0.0 && value.is_finite()) {
            return Err(format!("tolerance {name:?} must be positive"));
        }
        let slot = match name.trim() {
            "identity" => &mut self.identity,
            "finiteArithmetic" => &mut self.finite_arithmetic,
            "closedForm" => &mut self.closed_form,
            "raySinger" => &mut self.ray_singer,
            "cauchyRiemann" => &mut self.cauchy_riemann,
            "variation" => &mut self.variation,
            "reality" => &mut self.reality,
            other => return Err(format!("unknown tolerance {other:?}")),
        };
        *slot = value;
        Ok(())
    }
}
