//! Parallel transport around the circle.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `(t, x) ↦` an `n × n` complex matrix.
pub type MatrixFn = Arc<dyn Fn(f64, f64) -> DMatrix<Complex64> + Send + Sync>;

/// Minimum number of integration steps over `[0, 2π]`.
pub const MIN_STEPS: usize = 64;

/// A family of connections `∇_t = d + A_t(x) dx` on the trivial bundle of
/// rank `dim`, with optional derivative `ψ_t = d/dt A_t`.
#[derive(Clone)]
pub struct ConnectionFamily {
    pub dim: usize,
    pub coefficient: MatrixFn,
    pub derivative: Option<MatrixFn>,
}

impl std::fmt::Debug for ConnectionFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConnectionFamily")
            .field("dim", &self.dim)
            .field("has_derivative", &self.derivative.is_some())
            .finish()
    }
}

/// Step used when `ψ_t` is not supplied.
const DERIVATIVE_STEP: f64 = 1e-5;

impl ConnectionFamily {
    pub fn new(dim: usize, coefficient: MatrixFn, derivative: Option<MatrixFn>) -> Self {
        ConnectionFamily {
            dim,
            coefficient,
            derivative,
        }
    }

    /// A single connection with constant coefficient.
    pub fn constant(m: DMatrix<Complex64>) -> Self {
        let dim = m.nrows();
        let zero = DMatrix::zeros(dim, dim);
        ConnectionFamily::new(dim, Arc::new(move |_, _| m.clone()), Some(Arc::new(move |_, _| zero.clone())))
    }

    /// `A_t = i diag(a_1(t), ..., a_n(t))` with `ψ_t = i diag(a_j'(t))`.
    pub fn diagonal_path<F, G>(dim: usize, a: F, da: G) -> Self
    where
        F: Fn(f64) -> Vec<Complex64> + Send + Sync + 'static,
        G: Fn(f64) -> Vec<Complex64> + Send + Sync + 'static,
    {
        let diag = |v: Vec<Complex64>| {
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(v.into_iter().map(|z| Complex64::i() * z).collect()))
        };
        ConnectionFamily::new(
            dim,
            Arc::new(move |t, _| diag(a(t))),
            Some(Arc::new(move |t, _| diag(da(t)))),
        )
    }

    /// `∇_{a+t}` on the trivial line bundle.
    pub fn rank1_shift(a: Complex64) -> Self {
        ConnectionFamily::diagonal_path(1, move |t| vec![a + t], |_| vec![Complex64::new(1.0, 0.0)])
    }

    /// Gauge transform by a nowhere-vanishing periodic scalar function `g`:
    /// `A ↦ A + g'/g`.
    pub fn gauge_transformed<G, D>(&self, g: G, dg: D) -> Self
    where
        G: Fn(f64) -> Complex64 + Send + Sync + 'static,
        D: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        let base = self.coefficient.clone();
        let dim = self.dim;
        ConnectionFamily::new(
            dim,
            Arc::new(move |t, x| {
                let shift = dg(x) / g(x);
                base(t, x) + DMatrix::from_diagonal_element(dim, dim, shift)
            }),
            self.derivative.clone(),
        )
    }

    pub fn coefficient_at(&self, t: f64, x: f64) -> DMatrix<Complex64> {
        (self.coefficient)(t, x)
    }

    /// `ψ_t(x)`, by central differences when no derivative was supplied.
    pub fn derivative_at(&self, t: f64, x: f64) -> DMatrix<Complex64> {
        match &self.derivative {
            Some(d) => d(t, x),
            None => {
                let h = DERIVATIVE_STEP;
                ((self.coefficient)(t + h, x) - (self.coefficient)(t - h, x)) / Complex64::new(2.0 * h, 0.0)
            }
        }
    }

    /// `max |A_t(0) - A_t(2π)|`, entrywise.
    pub fn periodicity_defect(&self, t: f64) -> f64 {
        ((self.coefficient)(t, 0.0) - (self.coefficient)(t, TAU))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// `Φ_t(2π)` for `Φ' + A_t Φ = 0`, `Φ(0) = I`, by the classical fourth-order
/// Runge-Kutta scheme on a uniform grid.
pub fn monodromy(family: &ConnectionFamily, t: f64, steps: usize) -> Result<DMatrix<Complex64>> {
    if steps < MIN_STEPS {
        return Err(Error::InvalidInput(format!("need at least {MIN_STEPS} steps, got {steps}")));
    }
    let n = family.dim;
    let h = TAU / steps as f64;
    let hc = Complex64::new(h, 0.0);
    let half = Complex64::new(0.5 * h, 0.0);
    let mut phi = DMatrix::<Complex64>::identity(n, n);
    for k in 0..steps {
        let x = k as f64 * h;
        let a0 = family.coefficient_at(t, x);
        let am = family.coefficient_at(t, x + 0.5 * h);
        let a1 = family.coefficient_at(t, x + h);
        let k1 = -(&a0 * &phi);
        let k2 = -(&am * (&phi + &k1 * half));
        let k3 = -(&am * (&phi + &k2 * half));
        let k4 = -(&a1 * (&phi + &k3 * hc));
        phi += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * (hc / 6.0);
    }
    Ok(phi)
}

/// `log(det M) / 2πi`, reduced modulo `ℤ` to `Re ∈ [0, 1)`.
pub fn arg_class(m: &DMatrix<Complex64>) -> Complex64 {
    let z = m.clone().determinant().ln() / Complex64::new(0.0, TAU);
    let re = z.re - z.re.floor();
    Complex64::new(if re >= 1.0 { 0.0 } else { re }, z.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_connection() {
        let fam = ConnectionFamily::constant(DMatrix::zeros(2, 2));
        assert_eq!(monodromy(&fam, 0.0, 64).unwrap(), DMatrix::identity(2, 2));
        assert!(monodromy(&fam, 0.0, 63).is_err());
    }

    #[test]
    fn constant_connection() {
        let a = c(0.3, 0.2);
        let fam = ConnectionFamily::constant(DMatrix::from_diagonal_element(2, 2, Complex64::i() * a));
        let phi = monodromy(&fam, 0.0, 256).unwrap();
        let expected = (Complex64::new(0.0, -TAU) * a).exp();
        assert!((phi[(0, 0)] - expected).norm() < 1e-9);
        assert!(phi[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn gauge_invariance_of_determinant() {
        let fam = ConnectionFamily::rank1_shift(c(0.25, 0.1));
        let g = |x: f64| c(2.0 + x.cos(), x.sin());
        let dg = |x: f64| c(-x.sin(), x.cos());
        let moved = fam.gauge_transformed(g, dg);
        assert!(moved.periodicity_defect(0.0) < 1e-14);
        let d0 = monodromy(&fam, 0.0, 512).unwrap().determinant();
        let d1 = monodromy(&moved, 0.0, 512).unwrap().determinant();
        assert!((d0 - d1).norm() < 1e-9, "{d0} vs {d1}");
    }

    #[test]
    fn arg_examples() {
        let m = DMatrix::from_element(1, 1, (Complex64::new(0.0, TAU) * 0.3).exp());
        assert!((arg_class(&m) - c(0.3, 0.0)).norm() < 1e-14);
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            (Complex64::new(0.0, TAU) * 0.3).exp(),
            (Complex64::new(0.0, TAU) * 0.4).exp(),
        ]));
        assert!((arg_class(&m) - c(0.7, 0.0)).norm() < 1e-14);
        let m = DMatrix::from_element(1, 1, c((-TAU).exp(), 0.0));
        let arg = arg_class(&m);
        assert!(arg.re.abs() < 1e-14 && (arg.im - 1.0).abs() < 1e-14);
    }
}
