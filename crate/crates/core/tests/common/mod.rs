//! Reference implementations used to cross-check the library.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Logarithm with imaginary part in `(θ, θ + 2π)`.
pub fn log_branch(z: Complex64, theta: f64) -> Complex64 {
    let mut phi = z.im.atan2(z.re);
    while phi <= theta {
        phi += TAU;
    }
    while phi > theta + TAU {
        phi -= TAU;
    }
    c(z.norm().ln(), phi)
}

pub fn finite_ldet(pairs: &[(Complex64, u32)], theta: f64) -> Complex64 {
    pairs.iter().map(|&(v, m)| m as f64 * log_branch(v, theta)).sum()
}

/// `η = (Σ sign(Re λ) m + m_+ - m_-) / 2` for a finite spectrum.
pub fn finite_eta(pairs: &[(Complex64, u32)]) -> f64 {
    let mut total = 0.0;
    for &(v, m) in pairs {
        let m = m as f64;
        if v.re.abs() <= 1e-12 {
            total += if v.im > 0.0 { m } else { -m };
        } else if v.re > 0.0 {
            total += m;
        } else {
            total -= m;
        }
    }
    0.5 * total
}

/// Right-hand side of the det/eta identity for a finite spectrum, built
/// from unmerged squares.
pub fn finite_det_eta_rhs(pairs: &[(Complex64, u32)], theta: f64, upper: bool) -> Complex64 {
    let half: Complex64 = pairs.iter().map(|&(v, m)| 0.5 * m as f64 * log_branch(v * v, 2.0 * theta)).sum();
    let total: f64 = pairs.iter().map(|&(_, m)| m as f64).sum();
    let sign = if upper { 1.0 } else { -1.0 };
    half + sign * Complex64::i() * PI * (finite_eta(pairs) - 0.5 * total)
}

/// `Σ_{n<N} (n+q)^{-s}` plus the integral and boundary corrections of the tail.
pub fn hurwitz_direct(s: Complex64, q: Complex64) -> Complex64 {
    let n = 20_000;
    let mut sum = c(0.0, 0.0);
    for k in (0..n).rev() {
        sum += (k as f64 + q).powc(-s);
    }
    let x = n as f64 + q;
    sum + x.powc(1.0 - s) / (s - 1.0) + 0.5 * x.powc(-s) + s / 12.0 * x.powc(-s - 1.0)
}

pub fn in_hypothesis_sectors(v: Complex64, theta: f64) -> bool {
    let phi = v.im.atan2(v.re);
    (phi > -PI / 2.0 && phi <= theta) || (phi > PI / 2.0 && phi <= theta + PI)
}

/// Random finite spectrum in the annulus `0.5 ≤ |λ| ≤ 3`, kept out of the
/// det/eta sectors for `theta`.
pub fn random_admissible_spectrum(rng: &mut ChaCha8Rng, theta: f64) -> Vec<(Complex64, u32)> {
    let len = rng.gen_range(1..=8);
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let r = rng.gen_range(0.5..=3.0);
        let phi = rng.gen_range(-PI..PI);
        let v = Complex64::from_polar(r, phi);
        let margin = 1e-3;
        let near = |a: f64| ((phi - a + PI).rem_euclid(TAU) - PI).abs() < margin;
        if in_hypothesis_sectors(v, theta) || near(theta) || near(theta + PI) || near(PI / 2.0) || near(-PI / 2.0) {
            continue;
        }
        out.push((v, rng.gen_range(1..=3)));
    }
    out
}

/// Random finite spectrum avoiding every ray in `angles` by `margin`.
pub fn random_spectrum_avoiding(rng: &mut ChaCha8Rng, angles: &[f64], margin: f64) -> Vec<(Complex64, u32)> {
    let len = rng.gen_range(1..=10);
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let v = Complex64::from_polar(rng.gen_range(0.3..=4.0), rng.gen_range(-PI..PI));
        let phi = v.arg();
        if angles.iter().any(|&a| ((phi - a + PI).rem_euclid(TAU) - PI).abs() < margin) {
            continue;
        }
        out.push((v, rng.gen_range(1..=3)));
    }
    out
}

/// Eigenvalues in the closed sector swept from `t1` to `t2` (either order).
pub fn swept_count(pairs: &[(Complex64, u32)], t1: f64, t2: f64) -> i64 {
    let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    let mut count = 0i64;
    for &(v, m) in pairs {
        let phi = v.arg();
        let mut k = phi + ((lo - phi) / TAU).ceil() * TAU;
        while k <= hi {
            count += m as i64;
            k += TAU;
        }
    }
    if t1 <= t2 {
        count
    } else {
        -count
    }
}

pub fn det_i_minus(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    (DMatrix::<Complex64>::identity(n, n) - m).lu().determinant()
}

/// `G diag(μ) G⁻¹` with `μ` at distance at least `margin` from 1 and
/// bounded away from 0.
pub fn random_monodromy(rng: &mut ChaCha8Rng, n: usize, margin: f64) -> DMatrix<Complex64> {
    let mu: Vec<Complex64> = (0..n)
        .map(|_| loop {
            let z = Complex64::from_polar(rng.gen_range(0.4..2.5), rng.gen_range(-PI..PI));
            if (z - 1.0).norm() >= margin {
                break z;
            }
        })
        .collect();
    loop {
        let g = DMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let Some(inv) = g.clone().try_inverse() else {
            continue;
        };
        if g.norm() * inv.norm() > 50.0 {
            continue;
        }
        return &g * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(mu.clone())) * inv;
    }
}

pub fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!("criterion {id:>2} {} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}
