//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use reftorsion::circle::{
    arg_derivative_check, build_from_log_params, build_from_monodromy, build_rank1, eta_variation_check,
    holomorphy_scan, rank1_torsions, refined_torsion, torsion, trs_comparison, ConnectionFamily, LogParam, Region,
};
use reftorsion::determinant::{angle_shift_count, symmetric_spectrum_det, verify_det_eta, verify_det_eta_upper};
use reftorsion::spectrum::det_eta_angle;
use reftorsion::zetafun::{eta_invariant, hurwitz_zeta, hurwitz_zeta_ds0, zeta_at_zero};
use reftorsion::{CutAngle, Spectrum};

type Outcome = (bool, String);

fn lattice_grid() -> Vec<Complex64> {
    let mut out = Vec::new();
    for im in [-0.3, 0.0, 0.3] {
        for k in 1..=9 {
            out.push(c(k as f64 / 10.0, im));
        }
    }
    out
}

fn closed_form_torsion() -> Outcome {
    let start = Instant::now();
    let mut points: Vec<Complex64> = (1..=9).map(|k| c(k as f64 / 10.0, 0.0)).collect();
    points.extend([c(0.25, 0.2), c(0.25, -0.2), c(0.5, 0.3), c(0.5, -0.3)]);
    let mut worst: f64 = 0.0;
    for a in points {
        let t = torsion(&build_rank1(a).unwrap()).unwrap();
        let exact = 1.0 - (Complex64::new(0.0, TAU) * a).exp();
        worst = worst.max((t - exact).norm() / (1.0 + t.norm()));
    }
    let secs = start.elapsed().as_secs_f64();
    (worst < 1e-8 && secs < 1.0, format!("max relative error {worst:.2e}, {secs:.3} s"))
}

fn phase_modulus() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..20 {
        let a = k as f64 / 20.0;
        let t = torsion(&build_rank1(c(a, 0.0)).unwrap()).unwrap();
        let exact = 2.0 * (PI * a).sin() * Complex64::new(0.0, PI * (2.0 * a - 1.0) / 2.0).exp();
        worst = worst.max((t - exact).norm());
    }
    (worst < 1e-8, format!("max error {worst:.2e}"))
}

fn eta_lattice() -> Outcome {
    let mut worst: f64 = 0.0;
    for a in lattice_grid() {
        let eta = eta_invariant(&Spectrum::lattice(a, 1).unwrap()).unwrap();
        worst = worst.max((eta - (1.0 - 2.0 * a) / 2.0).norm());
    }
    (worst < 1e-8, format!("max error {worst:.2e}"))
}

fn det_eta_suite(upper: bool) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(if upper { 5 } else { 4 });
    let mut worst: f64 = 0.0;
    let mut cross: f64 = 0.0;
    for _ in 0..200 {
        let theta = rng.gen_range(-FRAC_PI_2 + 0.05..-0.05);
        let pairs = random_admissible_spectrum(&mut rng, theta);
        let spec = Spectrum::from_pairs(&pairs).unwrap();
        let cut = CutAngle::new(theta);
        let r = if upper {
            verify_det_eta_upper(&spec, cut)
        } else {
            verify_det_eta(&spec, cut)
        }
        .unwrap();
        worst = worst.max(r.residual);
        // library left side against the independent right side, and vice versa
        let lhs_cut = if upper { theta - PI } else { theta };
        let lhs = finite_ldet(&pairs, lhs_cut);
        let rhs = finite_det_eta_rhs(&pairs, theta, upper);
        cross = cross.max((r.lhs - rhs).norm()).max((lhs - r.rhs()).norm());
    }
    for a in lattice_grid() {
        let spec = Spectrum::lattice(a, 1).unwrap();
        let cut = det_eta_angle(&spec).unwrap();
        let r = if upper {
            verify_det_eta_upper(&spec, cut)
        } else {
            verify_det_eta(&spec, cut)
        }
        .unwrap();
        worst = worst.max(r.residual);
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst < 1e-9 && cross < 1e-9 && secs < 10.0,
        format!("max residual {worst:.2e}, oracle cross-check {cross:.2e}, {secs:.2} s"),
    )
}

fn angle_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_ldet: f64 = 0.0;
    let mut worst_det: f64 = 0.0;
    let mut count_mismatch = 0;
    for _ in 0..50 {
        let pairs = random_spectrum_avoiding(&mut rng, &[], 0.0);
        let spec = Spectrum::from_pairs(&pairs).unwrap();
        let args: Vec<f64> = pairs.iter().map(|(v, _)| v.arg()).collect();
        let mut done = 0;
        while done < 20 {
            let t1 = rng.gen_range(-PI..PI);
            let t2 = rng.gen_range(-PI..PI);
            let clear = |t: f64| args.iter().all(|&p| ((p - t + PI).rem_euclid(TAU) - PI).abs() > 1e-3);
            if !clear(t1) || !clear(t2) {
                continue;
            }
            done += 1;
            let r = angle_shift_count(&spec, CutAngle::new(t1), CutAngle::new(t2)).unwrap();
            if r.shift != swept_count(&pairs, t1, t2) {
                count_mismatch += 1;
            }
            let expected = Complex64::new(0.0, TAU * r.shift as f64);
            let direct = finite_ldet(&pairs, t2) - finite_ldet(&pairs, t1);
            worst_ldet = worst_ldet.max(r.ldet_residual).max((direct - expected).norm());
            worst_det = worst_det.max(r.det_residual);
        }
    }
    (
        worst_ldet < 1e-10 && worst_det < 1e-10 && count_mismatch == 0,
        format!("LDet residual {worst_ldet:.2e}, Det residual {worst_det:.2e}, {count_mismatch} count mismatches"),
    )
}

fn graded_eta_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for a in lattice_grid() {
        worst = worst.max(refined_torsion(&build_rank1(a).unwrap()).unwrap().residual);
    }
    (worst < 1e-9, format!("max residual {worst:.2e}"))
}

fn ray_singer() -> Outcome {
    let start = Instant::now();
    let mut unitary: f64 = 0.0;
    let mut models: Vec<_> = (1..=9).map(|k| build_rank1(c(k as f64 / 10.0, 0.0)).unwrap()).collect();
    models.push(
        build_from_log_params(vec![
            LogParam { a: c(0.2, 0.0), multiplicity: 1 },
            LogParam { a: c(0.7, 0.0), multiplicity: 2 },
        ])
        .unwrap(),
    );
    for m in &models {
        let r = trs_comparison(m).unwrap();
        unitary = unitary.max((r.abs_torsion - r.ray_singer).abs());
    }
    let unitary_secs = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let mut general: f64 = 0.0;
    for a in lattice_grid().into_iter().filter(|a| a.im != 0.0).chain([c(0.25, 0.1), c(0.75, -0.2)]) {
        general = general.max(trs_comparison(&build_rank1(a).unwrap()).unwrap().log_residual);
    }
    let general_secs = start.elapsed().as_secs_f64();
    (
        unitary < 1e-6 && general < 1e-6 && unitary_secs < 5.0 && general_secs < 5.0,
        format!(
            "unitary ||T|-T^RS| {unitary:.2e} ({unitary_secs:.2} s), log-ratio residual {general:.2e} ({general_secs:.2} s)"
        ),
    )
}

fn holomorphy() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for region in [
        Region { re_min: 0.1, re_max: 0.9, im_min: -0.3, im_max: 0.3 },
        Region { re_min: 1.2, re_max: 1.8, im_min: 0.1, im_max: 0.5 },
    ] {
        let r = holomorphy_scan(&region, 9, 1e-4).unwrap();
        let rel = r.max_residual / r.max_abs_torsion;
        ok &= rel < 1e-5;
        detail.push(format!("{rel:.2e}"));
    }
    (ok, format!("relative CR residuals {}", detail.join(", ")))
}

fn variation() -> Outcome {
    let eta = [
        eta_variation_check(|t| vec![c(0.25 + t, 0.0)], |_| vec![c(1.0, 0.0)], 0.0, 1e-4),
        eta_variation_check(|_| vec![c(0.3, 0.1)], |_| vec![c(0.0, 0.0)], 0.0, 1e-4),
        eta_variation_check(|t| vec![c(0.25 + 0.1 * t.sin(), 0.0)], |t| vec![c(0.1 * t.cos(), 0.0)], 0.7, 1e-4),
    ];
    let rank2 = ConnectionFamily::diagonal_path(
        2,
        |t| vec![c(0.2 + t, 0.1), c(0.6 + 0.1 * t.sin(), -0.2)],
        |t| vec![c(1.0, 0.0), c(0.1 * t.cos(), 0.0)],
    );
    let arg = [
        arg_derivative_check(&ConnectionFamily::rank1_shift(c(0.25, 0.0)), 0.0, 1e-4, 256),
        arg_derivative_check(
            &ConnectionFamily::constant(nalgebra::DMatrix::from_element(1, 1, c(0.0, 0.3))),
            0.0,
            1e-4,
            64,
        ),
        arg_derivative_check(&rank2, 0.4, 1e-4, 256),
    ];
    let eta_worst = eta.iter().map(|r| r.as_ref().unwrap().residual).fold(0.0, f64::max);
    let arg_worst = arg.iter().map(|r| r.as_ref().unwrap().residual).fold(0.0, f64::max);
    (
        eta_worst < 1e-6 && arg_worst < 1e-6,
        format!("eta residual {eta_worst:.2e}, Arg residual {arg_worst:.2e}"),
    )
}

fn random_symmetric(rng: &mut ChaCha8Rng, theta: f64, m_minus: u32) -> Vec<(Complex64, u32)> {
    let mut out = Vec::new();
    for _ in 0..m_minus {
        let r = rng.gen_range(0.5..3.0);
        out.push((c(0.0, r), 1));
        out.push((c(0.0, -r), 1));
    }
    for _ in 0..rng.gen_range(0..3) {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        out.push((c(sign * rng.gen_range(0.5..3.0), 0.0), rng.gen_range(1..=2)));
    }
    let pairs = rng.gen_range(if out.is_empty() { 1 } else { 0 }..4);
    let mut added = 0;
    while added < pairs {
        let v = Complex64::from_polar(rng.gen_range(0.5..3.0), rng.gen_range(0.05..PI - 0.05));
        let w = v.conj();
        let clear = |z: Complex64| {
            let phi = z.arg();
            !in_hypothesis_sectors(z, theta)
                && [theta, theta + PI, 2.0 * theta, FRAC_PI_2, -FRAC_PI_2]
                    .iter()
                    .all(|&a| ((phi - a + PI).rem_euclid(TAU) - PI).abs() > 1e-3)
                && ((2.0 * phi - 2.0 * theta + PI).rem_euclid(TAU) - PI).abs() > 1e-3
        };
        if !clear(v) || !clear(w) {
            continue;
        }
        let m = rng.gen_range(1..=2);
        out.push((v, m));
        out.push((w, m));
        added += 1;
    }
    out
}

fn real_coefficients() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_im: f64 = 0.0;
    let mut worst: f64 = 0.0;
    let mut sign_failures = 0;
    for k in 0..100 {
        let theta = rng.gen_range(-FRAC_PI_2 + 0.05..-0.05);
        let m_minus = (k % 3) as u32;
        let pairs = random_symmetric(&mut rng, theta, m_minus);
        let spec = Spectrum::from_pairs(&pairs).unwrap();
        let cut = CutAngle::new(theta);
        let eta = eta_invariant(&spec).unwrap();
        let mut square: Vec<(Complex64, u32)> = Vec::new();
        for &(v, m) in &pairs {
            match square.iter_mut().find(|(w, _)| (*w - v * v).norm() < 1e-12) {
                Some(entry) => entry.1 += m,
                None => square.push((v * v, m)),
            }
        }
        let zeta0 = zeta_at_zero(&Spectrum::from_pairs(&square).unwrap(), cut.doubled()).unwrap();
        worst_im = worst_im.max(eta.im.abs()).max(zeta0.im.abs());
        let r = symmetric_spectrum_det(&spec, cut).unwrap();
        let det = finite_ldet(&pairs, theta).exp();
        let scale = det.norm().max(1.0);
        worst = worst.max(r.residual).max((det - r.factored).norm() / scale);
        // the sign must be the one engineered, and the opposite sign must fail
        if r.m_minus != m_minus as u64 || (det + r.factored).norm() / scale < 1e-6 {
            sign_failures += 1;
        }
    }
    (
        worst_im < 1e-10 && worst < 1e-10 && sign_failures == 0,
        format!("max imaginary part {worst_im:.2e}, max residual {worst:.2e}, {sign_failures} sign failures"),
    )
}

fn kernel() -> Outcome {
    let mut worst: f64 = 0.0;
    worst = worst.max((hurwitz_zeta(c(2.0, 0.0), c(1.0, 0.0)).unwrap().value - PI * PI / 6.0).norm());
    worst = worst.max((hurwitz_zeta_ds0(c(1.0, 0.0)).unwrap() + 0.5 * TAU.ln()).norm());
    for i in 0..=6 {
        for j in 0..=4 {
            let q = c(0.1 + 1.9 * i as f64 / 6.0, -1.0 + 0.5 * j as f64);
            worst = worst.max((hurwitz_zeta(c(0.0, 0.0), q).unwrap().value - (0.5 - q)).norm());
            for s in [c(2.5, 0.0), c(3.0, 1.0), c(4.0, -2.0)] {
                let z = hurwitz_zeta(s, q).unwrap().value;
                worst = worst.max((z - hurwitz_direct(s, q)).norm());
            }
        }
    }
    for k in 1..=20 {
        let q = 0.1 * k as f64;
        let oracle = statrs::function::gamma::ln_gamma(q) - 0.5 * TAU.ln();
        worst = worst.max((hurwitz_zeta_ds0(c(q, 0.0)).unwrap() - oracle).norm());
    }
    (worst < 1e-10, format!("max error {worst:.2e}"))
}

fn rank_n() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst_det: f64 = 0.0;
    let mut worst_prod: f64 = 0.0;
    for k in 0..50 {
        let m = random_monodromy(&mut rng, 2 + k % 3, 0.05);
        let model = build_from_monodromy(&m).unwrap();
        let t = torsion(&model).unwrap();
        let scale = t.norm().max(f64::MIN_POSITIVE);
        worst_det = worst_det.max((t - det_i_minus(&m)).norm() / scale);
        let prod: Complex64 = rank1_torsions(&model).unwrap().into_iter().product();
        worst_prod = worst_prod.max((t - prod).norm() / scale);
    }
    (
        worst_det < 1e-8 && worst_prod < 1e-8,
        format!("det(I - M) relative error {worst_det:.2e}, rank-one product {worst_prod:.2e}"),
    )
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags; listing asks for test names only
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let criteria: [(u32, &str, fn() -> Outcome); 13] = [
        (1, "closed-form torsion", closed_form_torsion),
        (2, "phase/modulus factorization", phase_modulus),
        (3, "eta invariant of the lattice", eta_lattice),
        (4, "det/eta identity", || det_eta_suite(false)),
        (5, "det/eta identity, upper cut", || det_eta_suite(true)),
        (6, "angle independence", angle_independence),
        (7, "graded determinant and eta", graded_eta_identity),
        (8, "Ray-Singer comparison", ray_singer),
        (9, "holomorphy in a", holomorphy),
        (10, "variation formulas", variation),
        (11, "real coefficients", real_coefficients),
        (12, "Hurwitz kernel accuracy", kernel),
        (13, "rank-n consistency", rank_n),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let (pass, detail) = check();
        report(id, name, pass, &detail);
        if !pass {
            failed += 1;
        }
    }
    println!("{} of 13 criteria passed", 13 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
