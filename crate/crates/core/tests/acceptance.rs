//! Acceptance suite: every numbered check pins one headline identity of the
//! kernel at its stated tolerance and prints the measured worst residual.
//! Run with `cargo test -p dell-core --test acceptance -- --nocapture` to see
//! the per-check lines.

use dell_core::classical::{
    bracket_of, hamiltonian_gradient, integrate_flow, manakov_residual, FlowParams,
};
use dell_core::elliptic::{
    cauchy_determinant_residual, fay_residuals, theta_p, theta_relation_residual, Modulus,
    SeriesControl,
};
use dell_core::intertwiner::{xi_det_closed, xi_matrix, Positions, XiVariant};
use dell_core::lax::{
    averaged_lax, classical_rs_lax, hasegawa_residual, quasi_periodicity_residuals, sklyanin_lax,
    ModelParams, PhaseState,
};
use dell_core::linalg::{ComplexMatrix, CONDITION_LIMIT};
use dell_core::quantumops::{
    conjugation_residual, det_rep_residual_elliptic, det_rep_residual_rational,
    det_rep_residual_trig, dual_degeneration_residual, lax_det_rep_residual, shift_box,
    TrigDetRoute,
};
use dell_core::sampling::SplitMix64;
use dell_core::spectrum::{
    commutator_residual, dominance_cmp, eigenvalue_product, h1_eigenvalue_series, operator_matrix,
};
use dell_core::C64;
use std::cmp::Ordering;

const ONE: C64 = C64::new(1.0, 0.0);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ctl() -> SeriesControl {
    SeriesControl::default()
}

fn modulus() -> Modulus {
    Modulus::new(c(0.0, 0.8)).unwrap()
}

fn report(name: &str, worst: f64, tolerance: f64) {
    let verdict = if worst <= tolerance { "pass" } else { "FAIL" };
    println!("acceptance {name}: worst {worst:.3e} vs tolerance {tolerance:.1e} -> {verdict}");
    assert!(worst <= tolerance, "{name}: {worst:.3e} > {tolerance:.1e}");
}

fn random_positions(rng: &mut SplitMix64, n: usize) -> Positions {
    Positions::new(rng.separated_points(n, 0.35, 0.08)).unwrap()
}

fn model_params(eta: C64, omega: C64) -> ModelParams {
    let mut p = ModelParams::new(eta, c(0.1, 0.0), c(1.5, 0.0), modulus(), omega).unwrap();
    p.shift_cap = 8;
    p
}

/// Phase points with separations and momentum phases that keep ℒ(z,1) well
/// conditioned along short flows.
fn phase_point(seed: u64, n: usize) -> PhaseState {
    let base_q = [c(0.22, 0.05), c(-0.23, 0.13), c(0.04, -0.29)];
    let base_p = [c(0.1, 2.4), c(-0.15, -2.2), c(-0.02, 2.1)];
    let mut rng = SplitMix64::new(seed);
    let q: Vec<C64> = (0..n)
        .map(|i| base_q[i] + rng.complex_in((-0.04, 0.04), (-0.04, 0.04)))
        .collect();
    let p: Vec<C64> = (0..n)
        .map(|i| base_p[i] + rng.complex_in((-0.1, 0.1), (-0.15, 0.15)))
        .collect();
    PhaseState::new(Positions::new(q).unwrap(), p).unwrap()
}

#[test]
fn acceptance_01_gl2_first_hamiltonian_eigenvalue() {
    let mut rng = SplitMix64::new(42);
    let lambda = dell_core::spectrum::Partition::new(vec![1]).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let q = rng.complex_annulus(0.2, 0.9);
        let t = rng.complex_annulus(0.2, 0.9);
        let series = h1_eigenvalue_series(&lambda, 2, t, q, 2).unwrap();
        let order0 = -(ONE + t * q);
        let order1 = (ONE + q * t) * (ONE + q * q * t * t) / (q * t);
        worst = worst.max((series.coeff(0) - order0).norm() / order0.norm());
        worst = worst.max((series.coeff(1) - order1).norm() / order1.norm());
    }
    report("01 gl2-first-hamiltonian-eigenvalue", worst, 1e-10);
}

#[test]
fn acceptance_02_eigenvalue_triangularity_and_diagonal() {
    let u = c(0.37, 0.21);
    let t = c(0.62, 0.07);
    let q = c(0.45, -0.12);
    let order = 3;
    let mut worst = 0.0f64;
    for n_vars in 2..=3usize {
        for degree in 0..=4usize {
            for omega in [c(0.0, 0.0), c(0.1, 0.0)] {
                let (basis, matrix) =
                    operator_matrix(u, t, q, omega, n_vars, degree, order, 42 + degree as u64)
                        .unwrap();
                let scale = matrix.max_abs().max(1e-30);
                for (row, mu) in basis.iter().enumerate() {
                    for (col, lam) in basis.iter().enumerate() {
                        if dominance_cmp(mu, lam) == Some(Ordering::Greater) {
                            worst = worst.max(matrix.get(row, col).norm() / scale);
                        }
                    }
                    let expected = eigenvalue_product(u, mu, n_vars, t, q, order).eval(omega);
                    let diag = matrix.get(row, row);
                    worst = worst.max((diag - expected).norm() / expected.norm().max(1e-30));
                }
            }
        }
    }
    report("02 p0-triangularity-and-eigenvalue-diagonal", worst, 1e-10);
}

#[test]
fn acceptance_03_averaged_lax_determinant_representation() {
    let m = modulus();
    let eta = c(0.13, 0.0);
    let omega = c(0.1, 0.0);
    let mut rng = SplitMix64::new(42);
    let mut worst = 0.0f64;
    for n in 2..=3usize {
        for _ in 0..20 {
            let pos = random_positions(&mut rng, n);
            let z = Some(rng.complex_in((0.2, 0.55), (0.05, 0.2)));
            let r = lax_det_rep_residual(
                XiVariant::EllipticSpectral,
                z,
                &pos,
                eta,
                omega,
                2,
                &m,
                &ctl(),
            )
            .unwrap();
            worst = worst.max(r);
        }
    }
    report("03 averaged-lax-determinant-representation", worst, 1e-10);
}

#[test]
fn acceptance_04_direct_determinant_representations() {
    let m = modulus();
    let eta = c(0.13, 0.0);
    let omega = c(0.1, 0.0);
    let mut rng = SplitMix64::new(43);
    let mut worst = 0.0f64;
    for n in 2..=3usize {
        for _ in 0..20 {
            let pos = random_positions(&mut rng, n);
            let x: Vec<C64> = (0..n).map(|_| rng.complex_annulus(0.6, 1.5)).collect();
            let t = c(1.23, 0.11);
            worst = worst
                .max(det_rep_residual_trig(&x, t, omega, 2, TrigDetRoute::Vandermonde).unwrap());
            worst =
                worst.max(det_rep_residual_trig(&x, t, omega, 2, TrigDetRoute::Pairing).unwrap());
            worst = worst.max(det_rep_residual_rational(&pos, eta, omega, 2).unwrap());
            let z = rng.complex_in((0.25, 0.5), (0.05, 0.2));
            worst = worst
                .max(det_rep_residual_elliptic(z, &pos, eta, omega, 2, &m, &ctl()).unwrap());
        }
    }
    report("04 direct-determinant-representations", worst, 1e-10);
}

#[test]
fn acceptance_05_elliptic_identity_battery() {
    let m = modulus();
    let trig = Modulus::trigonometric();
    let mut rng = SplitMix64::new(44);
    let mut worst = 0.0f64;
    for sample in 0..110usize {
        // Cauchy determinant, sizes 1..4
        let n = 1 + sample % 4;
        let z = rng.complex_in((0.2, 0.5), (0.05, 0.2));
        let u: Vec<C64> = rng.separated_points(n, 0.4, 0.05);
        let w: Vec<C64> = rng
            .separated_points(n, 0.4, 0.05)
            .into_iter()
            .map(|v| v + c(0.05, 0.02))
            .collect();
        worst = worst.max(cauchy_determinant_residual(z, &u, &w, &m, &ctl()).unwrap());

        // Fay trisecant, degeneration, Eisenstein closed form
        let fz = rng.complex_in((0.1, 0.5), (0.02, 0.2));
        let fw = rng.complex_in((-0.5, -0.1), (0.02, 0.2));
        let u1 = rng.complex_in((0.1, 0.4), (-0.2, -0.02));
        let u2 = rng.complex_in((-0.4, -0.1), (-0.2, -0.02));
        let (r1, r2, r3) = fay_residuals(fz, fw, u1, u2, &m, &ctl()).unwrap();
        worst = worst.max(r1).max(r2).max(r3);

        // bridge between the theta families
        let wpt = rng.complex_in((-0.45, 0.45), (-0.15, 0.15));
        worst = worst.max(theta_relation_residual(wpt, &m, &ctl()).unwrap());

        // trigonometric limit: θ_p(x) → 1 − x at p = 0
        let x = rng.complex_annulus(0.3, 1.8);
        let v = theta_p(x, &trig, &ctl()).unwrap();
        worst = worst.max((v - (ONE - x)).norm() / (ONE - x).norm().max(1e-30));
    }
    report("05 elliptic-identity-battery", worst, 1e-10);
}

#[test]
fn acceptance_06_intertwiner_determinants() {
    let m = modulus();
    let mut rng = SplitMix64::new(45);
    let mut worst = 0.0f64;
    for variant in [
        XiVariant::RationalNoSpectral,
        XiVariant::TrigNoSpectral,
        XiVariant::RationalSpectral,
        XiVariant::TrigSpectral,
        XiVariant::EllipticSpectral,
    ] {
        for n in 2..=4usize {
            for _ in 0..8 {
                let pos = random_positions(&mut rng, n);
                let z = variant
                    .needs_spectral()
                    .then(|| rng.complex_in((0.1, 0.6), (0.02, 0.2)));
                let lu = xi_matrix(variant, z, &pos, &m, &ctl()).unwrap().det();
                let closed = xi_det_closed(variant, z, &pos, &m, &ctl()).unwrap();
                worst = worst.max((lu - closed).norm() / lu.norm().max(closed.norm()));
            }
        }
    }
    report("06a intertwiner-determinant-closed-forms", worst, 1e-10);

    // elliptic spectral determinant has its zero at z = 0 in the
    // center-of-mass frame
    let mut vanish = 0.0f64;
    for n in 2..=4usize {
        let pos = random_positions(&mut rng, n);
        let at_zero = xi_matrix(XiVariant::EllipticSpectral, Some(c(0.0, 0.0)), &pos, &m, &ctl())
            .unwrap()
            .det();
        let generic = xi_matrix(XiVariant::EllipticSpectral, Some(c(0.41, 0.12)), &pos, &m, &ctl())
            .unwrap()
            .det();
        vanish = vanish.max(at_zero.norm() / generic.norm());
    }
    report("06b elliptic-determinant-zero-at-origin", vanish, 1e-9);
}

#[test]
fn acceptance_07_hasegawa_and_sklyanin_gauges() {
    let params = model_params(c(0.13, 0.0), c(0.1, 0.0));
    let mut rng = SplitMix64::new(46);
    let mut worst = 0.0f64;
    for n in 2..=3usize {
        for _ in 0..5 {
            let pos = random_positions(&mut rng, n);
            let mom: Vec<C64> = (0..n).map(|_| rng.complex_in((-0.3, 0.3), (-0.2, 0.2))).collect();
            let state = PhaseState::new(pos, mom).unwrap();
            let z = rng.complex_in((0.25, 0.5), (0.08, 0.2));
            worst = worst.max(hasegawa_residual(z, &state, &params).unwrap());

            let skl = sklyanin_lax(z, &state, &params).unwrap();
            let g = dell_core::intertwiner::g_matrix(z, &state.pos, &params.modulus, &params.control)
                .unwrap();
            let rs = classical_rs_lax(z, &state, &params).unwrap();
            let conj = g
                .matmul(&rs)
                .matmul(&g.inverse_guarded(CONDITION_LIMIT).unwrap());
            worst = worst.max(skl.rel_distance(&conj));
        }
    }
    report("07 hasegawa-factorization-and-sklyanin-gauge", worst, 1e-9);
}

#[test]
fn acceptance_08_lax_quasi_periodicity() {
    let params = model_params(c(0.13, 0.0), c(0.1, 0.0));
    let mut rng = SplitMix64::new(47);
    let mut worst = 0.0f64;
    for n in 2..=3usize {
        let pos = random_positions(&mut rng, n);
        let mom: Vec<C64> = (0..n).map(|_| rng.complex_in((-0.3, 0.3), (-0.2, 0.2))).collect();
        let state = PhaseState::new(pos, mom).unwrap();
        let (r1, r2) = quasi_periodicity_residuals(c(0.33, 0.12), &state, &params).unwrap();
        worst = worst.max(r1).max(r2);
    }
    report("08 lax-quasi-periodicity", worst, 1e-10);
}

#[test]
fn acceptance_09_omega_zero_collapse() {
    let params = model_params(c(0.21, 0.0), c(0.0, 0.0));
    let mut rng = SplitMix64::new(48);
    let mut worst = 0.0f64;
    for n in 2..=3usize {
        let pos = random_positions(&mut rng, n);
        let mom: Vec<C64> = (0..n).map(|_| rng.complex_in((-0.3, 0.3), (-0.2, 0.2))).collect();
        let state = PhaseState::new(pos, mom).unwrap();
        let z = c(0.31, 0.17);
        let lambda = c(0.6, 0.2);
        let rs = classical_rs_lax(z, &state, &params).unwrap();

        let averaged = averaged_lax(z, lambda, &state, &params).unwrap();
        let expected = ComplexMatrix::identity(n).sub(&rs.scale(lambda));
        worst = worst.max(averaged.rel_distance(&expected));

        let l = dell_core::classical::manakov_l(z, lambda, &state, &params).unwrap();
        let resolvent = ComplexMatrix::identity(n)
            .sub(&rs)
            .inverse_guarded(CONDITION_LIMIT)
            .unwrap();
        let l_expected = ComplexMatrix::identity(n)
            .scale(lambda)
            .add(&resolvent.scale(ONE - lambda));
        worst = worst.max(l.rel_distance(&l_expected));
    }
    report("09 omega-zero-collapse", worst, 1e-12);
}

#[test]
fn acceptance_10_classical_involution() {
    let flow = FlowParams::default();
    let mut worst = 0.0f64;
    for n in 2..=3usize {
        let mut params = model_params(c(0.25, 0.0), c(0.1, 0.0));
        params.shift_cap = 6;
        for seed in 0..5u64 {
            let state = phase_point(100 + seed, n);
            let g1 = hamiltonian_gradient(1, flow.z0, &state, &params, &flow).unwrap();
            let g2 = hamiltonian_gradient(2, flow.z0, &state, &params, &flow).unwrap();
            let bracket = bracket_of(&g1, &g2);
            worst = worst.max(bracket.norm() / (g1.norm() * g2.norm()).max(1e-30));
        }
    }
    report("10 classical-involution", worst, 1e-6);
}

#[test]
fn acceptance_11_manakov_triple() {
    let params = model_params(c(0.25, 0.0), c(0.1, 0.0));
    let flow = FlowParams::default();
    let mut worst_eq = 0.0f64;
    let mut worst_tr = 0.0f64;
    let mut worst_agree = 0.0f64;
    for seed in 0..5u64 {
        let state = phase_point(200 + seed, 2);
        let rep = manakov_residual(1, flow.z0, c(0.5, 0.25), &state, &params, &flow).unwrap();
        worst_eq = worst_eq.max(rep.residual_right_form);
        worst_tr = worst_tr.max(rep.trace_b.norm());
        let forms = [
            rep.residual_adjoint_form,
            rep.residual_right_form,
            rep.residual_plain_form,
        ];
        worst_agree = worst_agree
            .max((forms[0] - forms[1]).abs())
            .max((forms[0] - forms[2]).abs());
    }
    report("11a manakov-equation-residual", worst_eq, 1e-6);
    report("11b manakov-trace-b", worst_tr, 1e-6);
    report("11c manakov-forms-agreement", worst_agree, 1e-10);
}

#[test]
fn acceptance_12_conservation_along_flow() {
    let params = model_params(c(0.25, 0.0), c(0.1, 0.0));
    let state = phase_point(300, 2);
    let probe = c(0.5, 0.2);

    let mut flow = FlowParams::default();
    flow.horizon = 1.0;
    flow.integrator_step = 1e-3;
    let run = integrate_flow(1, flow.z0, &state, &params, &flow, probe).unwrap();
    report("12a det-l-conservation-drift", run.max_drift, 1e-6);

    // fourth-order check at a coarse step where truncation error dominates
    let mut coarse = FlowParams::default();
    coarse.horizon = 0.64;
    coarse.integrator_step = 8e-3;
    let drift_coarse = integrate_flow(1, coarse.z0, &state, &params, &coarse, probe)
        .unwrap()
        .max_drift;
    coarse.integrator_step = 4e-3;
    let drift_fine = integrate_flow(1, coarse.z0, &state, &params, &coarse, probe)
        .unwrap()
        .max_drift;
    let ratio = drift_coarse / drift_fine.max(1e-300);
    println!(
        "acceptance 12b rk4-order: drift {drift_coarse:.3e} -> {drift_fine:.3e}, ratio {ratio:.1}"
    );
    assert!(
        (8.0..=32.0).contains(&ratio),
        "step halving gave ratio {ratio}, expected ≈16"
    );
}

#[test]
fn acceptance_13_conjugation_between_generating_functions() {
    let m = modulus();
    let mut rng = SplitMix64::new(49);
    let mut worst = 0.0f64;
    for n in 2..=3usize {
        let cap = if n == 2 { 2 } else { 1 };
        for _ in 0..5 {
            let pos = random_positions(&mut rng, n);
            for shift in shift_box(n, cap) {
                let r = conjugation_residual(
                    &shift,
                    &pos,
                    c(0.13, 0.0),
                    c(0.1, 0.0),
                    c(0.1, 0.0),
                    &m,
                    &ctl(),
                )
                .unwrap();
                worst = worst.max(r);
            }
        }
    }
    report("13 theta-form-conjugation", worst, 1e-10);
}

#[test]
fn acceptance_14_dual_model_degeneration() {
    let m = modulus();
    let mut rng = SplitMix64::new(50);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let pos = random_positions(&mut rng, 2);
        let r = dual_degeneration_residual(
            c(1e6, 0.0),
            &pos,
            c(0.13, 0.0),
            c(0.1, 0.0),
            2,
            &m,
            &ctl(),
        )
        .unwrap();
        worst = worst.max(r);
    }
    report("14 rational-spectral-degeneration", worst, 1e-5);
}

#[test]
fn acceptance_15_quantum_commutativity_p0() {
    let t = c(0.6, 0.11);
    let q = c(0.52, -0.06);
    let r = commutator_residual(t, q, 2, 2, 2, 42).unwrap();
    report("15 p0-hamiltonian-commutativity", r, 1e-10);
}
