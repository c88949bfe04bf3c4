//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (visible with `cargo test --test acceptance -- --nocapture`).

mod common;

use beamop::geometry::{local_frame_exact, local_frame_paraxial, WaveVector};
use beamop::modes::{overlap1d, propagate_kernel_check};
use beamop::operators::{
    build_j, build_p, ccr_table, expected_commutator, oracle_j_operators, oracle_p_operators,
};
use beamop::oracle::{quadrature_moments, GradientTerms, GridSpec};
use beamop::quad::log_log_slope;
use beamop::states::{per_photon_oam, six_mode_state, Polarization};
use beamop::{BeamParams, ModeSpace, C_LIGHT};
use common::random_six_mode;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn params() -> BeamParams {
    BeamParams::from_wavelength(1.064e-6, 1.0e-3).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// 1. Every entry of the built P and J families matches the 2D-quadrature
///    oracle within 1e-6 of the family max norm at ncut = 6.
#[test]
fn criterion_1_matrix_element_oracle_equivalence() {
    let start = Instant::now();
    let space = ModeSpace::new(6);
    let params = params();

    let built_p = build_p(&space, &params);
    let (orac_p, flags_p) = oracle_p_operators(&space, &params).unwrap();
    let built_j = build_j(&space, &params);
    let (orac_j, flags_j) = oracle_j_operators(&space, &params).unwrap();

    let mut worst: f64 = 0.0;
    for (built, oracle) in [
        (&built_p.px, &orac_p.px),
        (&built_p.py, &orac_p.py),
        (&built_p.pz, &orac_p.pz),
        (&built_j.jx, &orac_j.jx),
        (&built_j.jy, &orac_j.jy),
        (&built_j.jz, &orac_j.jz),
        (&built_j.sz, &orac_j.sz),
        (&built_j.lz, &orac_j.lz),
    ] {
        let diff = built.matrix() - oracle.matrix();
        let dev = diff.iter().fold(0.0_f64, |a, v| a.max(v.norm())) / built.max_norm();
        worst = worst.max(dev);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst < 1e-6 && flags_p.is_empty() && flags_j.is_empty() && elapsed < 60.0;
    report(
        "1 (oracle equivalence)",
        pass,
        &format!(
            "max relative deviation {worst:.2e}, {} flagged entries, {elapsed:.1} s",
            flags_p.len() + flags_j.len()
        ),
    );
}

/// 2. The interior commutation table at ncut = 6 reproduces the anomalous
///    algebra with residuals below 1e-12 and exact structure constants.
#[test]
fn criterion_2_commutation_table() {
    let space = ModeSpace::new(6);
    let reports = ccr_table(&space, &params()).unwrap();
    let mut checked_lp_pairs = 0;
    let mut worst_residual: f64 = 0.0;
    let mut ok = true;
    for r in &reports {
        worst_residual = worst_residual.max(r.residual_norm);
        if r.residual_norm >= 1e-12 {
            ok = false;
            eprintln!(
                "residual too large for {:?}: {:.2e}",
                r.pair, r.residual_norm
            );
        }
        let lp_only = !r.pair.0.starts_with('S') && !r.pair.1.starts_with('S');
        if lp_only {
            checked_lp_pairs += 1;
        }
        match expected_commutator(&r.pair.0, &r.pair.1) {
            None => {
                if r.identified_rhs != "zero" {
                    ok = false;
                    eprintln!(
                        "{:?} should vanish, identified {}",
                        r.pair, r.identified_rhs
                    );
                }
            }
            Some((rhs, f)) => {
                let coef_ok =
                    (r.coefficient[0] - f).abs() <= 1e-12 && r.coefficient[1].abs() <= 1e-12;
                if r.identified_rhs != rhs || !coef_ok {
                    ok = false;
                    eprintln!(
                        "{:?}: expected i*lambda_bar*({f})*{rhs}, got {} with coef {:?}",
                        r.pair, r.identified_rhs, r.coefficient
                    );
                }
            }
        }
    }
    report(
        "2 (commutation table)",
        ok && checked_lp_pairs == 15 && reports.len() == 36,
        &format!("{checked_lp_pairs} L/P pairs + spin pairs, worst residual {worst_residual:.2e}"),
    );
}

/// 3. One hundred random six-mode states reproduce the closed-form moments
///    to 1e-12 in the natural unit of each component.
#[test]
fn criterion_3_six_mode_closed_forms() {
    let space = ModeSpace::new(3);
    let params = params();
    let p = build_p(&space, &params);
    let j = build_j(&space, &params);
    let (theta0, w0, lam) = (params.theta0(), params.w0(), params.lambda_bar());

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (state, pol, [a00, a10, a01]) = random_six_mode(&mut rng, space);
        let sigma = pol.helicity();
        let expected = [
            (theta0 * (a00.conj() * a10).im, theta0),
            (theta0 * (a00.conj() * a01).im, theta0),
            (1.0, 1.0),
            (w0 * (a00.conj() * a01).re, w0),
            (-w0 * (a00.conj() * a10).re, w0),
            (lam * (sigma + 2.0 * (a10.conj() * a01).im), lam),
        ];
        let actual = [
            state.expectation(&p.px).unwrap(),
            state.expectation(&p.py).unwrap(),
            state.expectation(&p.pz).unwrap(),
            state.expectation(&j.jx).unwrap(),
            state.expectation(&j.jy).unwrap(),
            state.expectation(&j.jz).unwrap(),
        ];
        for ((want, scale), got) in expected.iter().zip(actual.iter()) {
            worst = worst.max((got.re - want).abs() / scale);
            worst = worst.max(got.im.abs() / scale);
        }
    }
    report(
        "3 (six-mode closed forms)",
        worst < 1e-12,
        &format!("100 draws, worst scaled deviation {worst:.2e}"),
    );
}

/// 4. Circularly polarized first-order Laguerre-Gauss states carry
///    Jz = λ̄(σ ± 1) and ±1 units of orbital angular momentum per photon.
#[test]
fn criterion_4_laguerre_gauss_oam() {
    let space = ModeSpace::new(3);
    let params = params();
    let p = build_p(&space, &params);
    let j = build_j(&space, &params);
    let lam = params.lambda_bar();

    let mut worst: f64 = 0.0;
    for ell_sign in [1.0_f64, -1.0] {
        for pol_sign in [1_i8, -1] {
            let pol = Polarization::circular(pol_sign);
            let state = six_mode_state(
                space,
                &pol,
                c(0.0, 0.0),
                c(INV_SQRT2, 0.0),
                c(0.0, ell_sign * INV_SQRT2),
            )
            .unwrap();
            let jz = state.expectation(&j.jz).unwrap().re;
            let expected = lam * (pol.helicity() + ell_sign);
            worst = worst.max((jz - expected).abs() / lam);
            let ell = per_photon_oam(&state, &j.lz, &p.pz, &params).unwrap();
            worst = worst.max((ell - ell_sign).abs());
        }
    }
    report(
        "4 (Laguerre-Gauss OAM)",
        worst < 1e-12,
        &format!("worst scaled deviation {worst:.2e}"),
    );
}

/// 5. For 20 random six-mode coherent states the 512² field quadrature
///    matches the operator expectations below 1e-3 for all six moments, and
///    moving the plane to zR/2 shifts nothing by more than 5e-3.
#[test]
fn criterion_5_field_quadrature_oracle() {
    let space = ModeSpace::new(2);
    let params = params();
    let spec = GridSpec::default();
    let z_half = 0.5 * params.rayleigh_range();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_rel: f64 = 0.0;
    let mut worst_shift: f64 = 0.0;
    for _ in 0..20 {
        let (state, _, _) = random_six_mode(&mut rng, space);
        let report0 = beamop::oracle::integrate_moments(&state, &params, &spec, 0.0).unwrap();
        assert!(report0.warnings.is_empty());
        worst_rel = worst_rel.max(report0.max_rel_error());

        let (quad_z, _) =
            quadrature_moments(&state, &params, &spec, z_half, GradientTerms::Included).unwrap();
        let at_z = [
            quad_z.p[0],
            quad_z.p[1],
            quad_z.p[2],
            quad_z.j[0],
            quad_z.j[1],
            quad_z.j[2],
        ];
        for (cmp, vz) in report0.comparisons.iter().zip(at_z.iter()) {
            let v0 = cmp.quadrature_value;
            worst_shift = worst_shift.max((vz - v0).abs() / v0.abs().max(1e-12));
        }
    }
    report(
        "5 (field-quadrature oracle)",
        worst_rel < 1e-3 && worst_shift < 5e-3,
        &format!("worst rel_error {worst_rel:.2e}, worst z-shift {worst_shift:.2e}"),
    );
}

/// 6. The intensity centroid of cos(ε) ψ00 + sin(ε) ψ10 equals
///    -<Jy>/<Pz> within 1e-4: transverse orbital angular momentum is the
///    beam displacement.
#[test]
fn criterion_6_displacement_link() {
    let space = ModeSpace::new(2);
    let params = params();
    let p = build_p(&space, &params);
    let j = build_j(&space, &params);
    let spec = GridSpec::default();

    let mut worst: f64 = 0.0;
    for eps in [0.05_f64, 0.2, 0.5] {
        let state = six_mode_state(
            space,
            &Polarization::linear_x(),
            c(eps.cos(), 0.0),
            c(eps.sin(), 0.0),
            c(0.0, 0.0),
        )
        .unwrap();
        let centroid = beamop::oracle::intensity_centroid(&state, &params, &spec, 0.0).unwrap();
        let jy = state.expectation(&j.jy).unwrap().re;
        let pz = state.expectation(&p.pz).unwrap().re;
        let from_ops = -jy / pz;
        worst = worst.max((centroid.0 - from_ops).abs() / from_ops.abs());
    }
    report(
        "6 (displacement link)",
        worst < 1e-4,
        &format!("worst relative mismatch {worst:.2e}"),
    );
}

/// 7. The paraxial frame error scales as θ² (fitted slope 2.0 ± 0.1) and
///    the κ_z expansion residual as θ⁴ (slope 4.0 ± 0.2).
#[test]
fn criterion_7_paraxial_error_scaling() {
    let omega = 1.8e15;
    let thetas: Vec<f64> = (0..12)
        .map(|i| 1e-3 * (100.0_f64).powf(i as f64 / 11.0))
        .collect();

    let frame_dev: Vec<f64> = thetas
        .iter()
        .map(|&theta| {
            let mut worst: f64 = 0.0;
            for j in 0..16 {
                let az = std::f64::consts::TAU * j as f64 / 16.0;
                let k = omega / C_LIGHT;
                let wave = WaveVector::new(
                    k * theta.sin() * az.cos(),
                    k * theta.sin() * az.sin(),
                    omega,
                )
                .unwrap();
                worst = worst.max(
                    local_frame_paraxial(&wave).max_component_deviation(&local_frame_exact(&wave)),
                );
            }
            worst
        })
        .collect();
    let frame_slope = log_log_slope(&thetas, &frame_dev);

    let kappa_res: Vec<f64> = thetas
        .iter()
        .map(|&theta| {
            let k = omega / C_LIGHT;
            let wave = WaveVector::new(k * theta.sin(), 0.0, omega).unwrap();
            (wave.kappa_z() - wave.kappa_z_paraxial()).abs()
        })
        .collect();
    let kappa_slope = log_log_slope(&thetas, &kappa_res);

    let pass = (frame_slope - 2.0).abs() <= 0.1 && (kappa_slope - 4.0).abs() <= 0.2;
    report(
        "7 (paraxial error scaling)",
        pass,
        &format!("frame slope {frame_slope:.3}, kappa_z slope {kappa_slope:.3}"),
    );
}

/// 8. Without the first-order gradient terms the circular Gaussian loses
///    its longitudinal angular momentum: the quadrature collapses below 5%
///    of the full value.
#[test]
fn criterion_8_gradient_term_necessity() {
    let space = ModeSpace::new(2);
    let params = params();
    let spec = GridSpec::default();
    let state = six_mode_state(
        space,
        &Polarization::circular(1),
        c(1.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
    )
    .unwrap();
    let (full, _) =
        quadrature_moments(&state, &params, &spec, 0.0, GradientTerms::Included).unwrap();
    let (bare, _) =
        quadrature_moments(&state, &params, &spec, 0.0, GradientTerms::Omitted).unwrap();
    let ratio = bare.j[2].abs() / full.j[2].abs();
    report(
        "8 (gradient-term necessity)",
        ratio < 0.05 && (full.j[2] - params.lambda_bar()).abs() < 1e-3 * params.lambda_bar(),
        &format!("|Jz(no grad)|/|Jz(full)| = {ratio:.2e}"),
    );
}

/// 9. Mode-layer hygiene: orthonormality to 1e-8 for all indices ≤ 6 at
///    three planes, and kernel-propagation residuals below 1e-6 for
///    indices ≤ 2 within a Rayleigh range.
#[test]
fn criterion_9_mode_layer_hygiene() {
    let params = params();
    let zr = params.rayleigh_range();

    let mut worst_ortho: f64 = 0.0;
    for z in [0.0, 0.5 * zr, 2.0 * zr] {
        // 1D overlap matrix; 2D overlaps factorize over the axes
        let mut o = [[Complex64::default(); 7]; 7];
        for (n1, row) in o.iter_mut().enumerate() {
            for (n2, v) in row.iter_mut().enumerate() {
                *v = overlap1d(n1, n2, z, &params);
            }
        }
        for n in 0..7 {
            for m in 0..7 {
                for np in 0..7 {
                    for mp in 0..7 {
                        let got = o[n][np] * o[m][mp];
                        let want = if n == np && m == mp { 1.0 } else { 0.0 };
                        worst_ortho = worst_ortho.max((got - want).norm());
                    }
                }
            }
        }
    }

    let mut worst_kernel: f64 = 0.0;
    for z in [-zr, -0.4 * zr, 0.55 * zr, zr] {
        for n in 0..=2 {
            for m in 0..=2 {
                worst_kernel = worst_kernel.max(propagate_kernel_check(n, m, z, &params));
            }
        }
    }

    report(
        "9 (mode-layer hygiene)",
        worst_ortho < 1e-8 && worst_kernel < 1e-6,
        &format!(
            "worst orthonormality {worst_ortho:.2e}, worst kernel residual {worst_kernel:.2e}"
        ),
    );
}
