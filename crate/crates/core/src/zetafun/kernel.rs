//! Hurwitz zeta by Euler-Maclaurin summation and the complex log-gamma
//! function by its Stirling series.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bernoulli numbers `B_2, B_4, ..., B_28`.
const BERNOULLI_EVEN: [f64; 14] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
];

/// Number of Bernoulli correction terms in the Euler-Maclaurin tail.
pub const EM_ORDER: usize = 12;

/// Terms of the Stirling series for `ln Γ`.
const STIRLING_TERMS: usize = 10;

/// `ln Γ` is evaluated after shifting the argument to `Re z >= STIRLING_SHIFT`.
const STIRLING_SHIFT: f64 = 15.0;

/// `B_{2k} / (2k)!` for `k = 1..=14`.
fn bernoulli_over_factorial() -> &'static [f64; 14] {
    static TABLE: OnceLock<[f64; 14]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; 14];
        let mut fact = 1.0_f64;
        for (k, slot) in out.iter_mut().enumerate() {
            let n = 2 * (k + 1);
            fact *= ((n - 1) * n) as f64;
            *slot = BERNOULLI_EVEN[k] / fact;
        }
        out
    })
}

/// A continued zeta value together with a bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ZetaResult {
    #[serde(with = "crate::serde_complex")]
    pub value: Complex64,
    pub error_estimate: f64,
}

impl ZetaResult {
    pub fn exact(value: Complex64) -> Self {
        ZetaResult {
            value,
            error_estimate: 0.0,
        }
    }
}

/// Number of explicitly summed terms before switching to the asymptotic tail.
fn shift_terms(s: Complex64, q: Complex64) -> usize {
    let n = (10.0 + s.im.abs() + q.norm()).ceil();
    (n as usize).max(20)
}

/// Analytic continuation of `Σ_{n≥0} (n+q)^{-s}` for `Re q > 0`, `s ≠ 1`.
pub fn hurwitz_zeta(s: Complex64, q: Complex64) -> Result<ZetaResult> {
    if q.re <= 0.0 {
        return Err(Error::Domain(format!("Hurwitz zeta needs Re q > 0, got q = {q}")));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::PoleAtOne);
    }
    let n = shift_terms(s, q);

    let mut head = Complex64::new(0.0, 0.0);
    for k in (0..n).rev() {
        head += (-s * (q + k as f64).ln()).exp();
    }

    let w = q + n as f64;
    let log_w = w.ln();
    let w_pow = (-s * log_w).exp(); // w^{-s}
    let inv_w2 = (w * w).inv();

    let mut tail = w * w_pow / (s - 1.0) + 0.5 * w_pow;

    // term_k = B_2k/(2k)! * (s)_{2k-1} * w^{-s-2k+1}
    let coeffs = bernoulli_over_factorial();
    let mut rising = s; // (s)_{2k-1}
    let mut power = w_pow / w; // w^{-s-2k+1}
    for (k, coeff) in coeffs.iter().enumerate().take(EM_ORDER) {
        tail += *coeff * rising * power;
        let m = (2 * k + 1) as f64;
        rising *= (s + m) * (s + m + 1.0);
        power *= inv_w2;
    }
    let first_omitted = coeffs[EM_ORDER] * rising * power;
    let sigma = s.re + (2 * EM_ORDER + 1) as f64;
    let ratio = (s + (2 * EM_ORDER + 1) as f64).norm() / sigma;
    let error_estimate = first_omitted.norm() * if sigma > 0.0 { ratio.max(1.0) } else { 1.0 };

    Ok(ZetaResult {
        value: head + tail,
        error_estimate,
    })
}

/// Principal branch of `ln Γ(z)` for `Re z > 0`, analytic in that half plane
/// and real on the positive axis.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if z.re <= 0.0 {
        return Err(Error::Domain(format!("ln Γ is evaluated for Re z > 0, got {z}")));
    }
    let shift = (STIRLING_SHIFT - z.re).ceil().max(0.0) as usize;
    let mut correction = Complex64::new(0.0, 0.0);
    for k in 0..shift {
        correction += (z + k as f64).ln();
    }
    let w = z + shift as f64;
    let inv_w = w.inv();
    let inv_w2 = inv_w * inv_w;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv_w;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(STIRLING_TERMS) {
        let n = (2 * (k + 1)) as f64;
        series += *b / (n * (n - 1.0)) * power;
        power *= inv_w2;
    }
    let stirling = (w - 0.5) * w.ln() - w + 0.5 * TAU.ln() + series;
    Ok(stirling - correction)
}

/// `∂_s ζ_H(s, q)` at `s = 0`, i.e. `ln Γ(q) - ½ ln 2π`.
pub fn hurwitz_zeta_ds0(q: Complex64) -> Result<Complex64> {
    if q.re <= 0.0 {
        return Err(Error::Domain(format!("Hurwitz zeta needs Re q > 0, got q = {q}")));
    }
    Ok(ln_gamma(q)? - 0.5 * TAU.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basel_value() {
        let z = hurwitz_zeta(c(2.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((z.value - c(PI * PI / 6.0, 0.0)).norm() < 1e-13);
        assert!(z.error_estimate < 1e-20);
    }

    #[test]
    fn value_at_zero() {
        let z = hurwitz_zeta(c(0.0, 0.0), c(1.0 / 3.0, 0.0)).unwrap();
        assert!((z.value - c(1.0 / 6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn riemann_values_at_negative_integers() {
        let z = hurwitz_zeta(c(-1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((z.value.re + 1.0 / 12.0).abs() < 1e-13);
        let z = hurwitz_zeta(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((z.value.re + 0.5).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        assert_eq!(hurwitz_zeta(c(1.0, 0.0), c(1.0, 0.0)), Err(Error::PoleAtOne));
        assert!(matches!(hurwitz_zeta(c(2.0, 0.0), c(0.0, 1.0)), Err(Error::Domain(_))));
        assert!(matches!(hurwitz_zeta_ds0(c(-0.5, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn log_gamma_special_values() {
        assert!(ln_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        assert!(ln_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-14);
        let half = ln_gamma(c(0.5, 0.0)).unwrap();
        assert!((half - c(0.5 * PI.ln(), 0.0)).norm() < 1e-14);
        // Γ(5) = 24
        assert!((ln_gamma(c(5.0, 0.0)).unwrap().re - 24f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn log_gamma_reflection_on_the_line() {
        // |Γ(1/2 + iy)|^2 = π / cosh(πy)
        for y in [0.1, 0.7, 2.5] {
            let g = ln_gamma(c(0.5, y)).unwrap();
            assert!((2.0 * g.re - (PI / (PI * y).cosh()).ln()).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_at_zero() {
        let d = hurwitz_zeta_ds0(c(1.0, 0.0)).unwrap();
        assert!((d.re + 0.5 * TAU.ln()).abs() < 1e-14);
        let d = hurwitz_zeta_ds0(c(0.5, 0.0)).unwrap();
        assert!((d.re + 0.5 * 2f64.ln()).abs() < 1e-14);
    }
}
