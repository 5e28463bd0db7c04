//! Registry of verification checks driven by `dell verify`. Each check
//! evaluates one identity over seeded samples and reports its worst relative
//! residual against a pinned tolerance.

use crate::report::CheckRecord;
use dell_core::classical::{bracket_of, hamiltonian_gradient, integrate_flow, manakov_residual, FlowParams};
use dell_core::elliptic::{
    cauchy_determinant_residual, fay_residuals, jacobi_theta, theta_p, theta_relation_residual,
    Modulus, SeriesControl,
};
use dell_core::intertwiner::{g_matrix, xi_det_closed, xi_matrix, Positions, XiVariant};
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
    Partition,
};
use dell_core::{C64, KernelError, Result};
use std::cmp::Ordering;

const ONE: C64 = C64::new(1.0, 0.0);

pub struct CheckContext {
    pub params: ModelParams,
    pub seed: u64,
}

impl CheckContext {
    fn ctl(&self) -> &SeriesControl {
        &self.params.control
    }

    fn modulus(&self) -> &Modulus {
        &self.params.modulus
    }

    fn rng(&self, salt: u64) -> SplitMix64 {
        SplitMix64::new(self.seed.wrapping_add(salt))
    }

    fn positions(&self, rng: &mut SplitMix64, n: usize) -> Result<Positions> {
        Positions::new(rng.separated_points(n, 0.35, 0.08))
    }

    fn benign_phase_point(&self, salt: u64, n: usize) -> Result<PhaseState> {
        let base_q = [
            C64::new(0.22, 0.05),
            C64::new(-0.23, 0.13),
            C64::new(0.04, -0.29),
        ];
        let base_p = [
            C64::new(0.1, 2.4),
            C64::new(-0.15, -2.2),
            C64::new(-0.02, 2.1),
        ];
        let mut rng = self.rng(salt);
        let q: Vec<C64> = (0..n)
            .map(|i| base_q[i] + rng.complex_in((-0.04, 0.04), (-0.04, 0.04)))
            .collect();
        let p: Vec<C64> = (0..n)
            .map(|i| base_p[i] + rng.complex_in((-0.1, 0.1), (-0.15, 0.15)))
            .collect();
        PhaseState::new(Positions::new(q)?, p)
    }
}

pub struct Check {
    pub name: &'static str,
    pub anchor: &'static str,
    pub tolerance: f64,
    pub run: fn(&CheckContext) -> Result<f64>,
}

/// The full registry in report order.
pub fn registry() -> Vec<Check> {
    vec![
        Check {
            name: "theta-oddness",
            anchor: "odd-jacobi-theta",
            tolerance: 1e-12,
            run: |cx| {
                let mut rng = cx.rng(1);
                let mut worst = 0.0f64;
                for _ in 0..50 {
                    let z = rng.complex_in((-0.6, 0.6), (-0.25, 0.25));
                    let plus = jacobi_theta(z, cx.modulus(), cx.ctl())?;
                    if plus.norm() < 1e-6 {
                        continue;
                    }
                    let minus = jacobi_theta(-z, cx.modulus(), cx.ctl())?;
                    worst = worst.max((plus + minus).norm() / plus.norm());
                }
                Ok(worst)
            },
        },
        Check {
            name: "theta-family-bridge",
            anchor: "theta-p-to-jacobi-relation",
            tolerance: 1e-10,
            run: |cx| {
                let mut rng = cx.rng(2);
                let mut worst = 0.0f64;
                for _ in 0..50 {
                    let w = rng.complex_in((-0.45, 0.45), (-0.15, 0.15));
                    worst = worst.max(theta_relation_residual(w, cx.modulus(), cx.ctl())?);
                }
                Ok(worst)
            },
        },
        Check {
            name: "theta-trig-limit",
            anchor: "theta-p-trigonometric-limit",
            tolerance: 1e-12,
            run: |cx| {
                let trig = Modulus::trigonometric();
                let mut rng = cx.rng(3);
                let mut worst = 0.0f64;
                for _ in 0..50 {
                    let x = rng.complex_annulus(0.3, 1.8);
                    let v = theta_p(x, &trig, cx.ctl())?;
                    worst = worst.max((v - (ONE - x)).norm() / (ONE - x).norm().max(1e-30));
                }
                Ok(worst)
            },
        },
        Check {
            name: "cauchy-determinant",
            anchor: "elliptic-cauchy-determinant",
            tolerance: 1e-10,
            run: |cx| {
                let mut rng = cx.rng(4);
                let mut worst = 0.0f64;
                for sample in 0..40 {
                    let n = 1 + sample % 4;
                    let z = rng.complex_in((0.2, 0.5), (0.05, 0.2));
                    let u = rng.separated_points(n, 0.4, 0.05);
                    let w: Vec<C64> = rng
                        .separated_points(n, 0.4, 0.05)
                        .into_iter()
                        .map(|v| v + C64::new(0.05, 0.02))
                        .collect();
                    worst =
                        worst.max(cauchy_determinant_residual(z, &u, &w, cx.modulus(), cx.ctl())?);
                }
                Ok(worst)
            },
        },
        Check {
            name: "fay-trisecant",
            anchor: "fay-trisecant-identity",
            tolerance: 1e-10,
            run: |cx| fay_worst(cx, 5, 0),
        },
        Check {
            name: "fay-degeneration",
            anchor: "fay-eisenstein-degeneration",
            tolerance: 1e-10,
            run: |cx| fay_worst(cx, 6, 1),
        },
        Check {
            name: "fay-eisenstein-closed-form",
            anchor: "eisenstein-bracket-closed-form",
            tolerance: 1e-10,
            run: |cx| fay_worst(cx, 7, 2),
        },
        Check {
            name: "xi-determinants",
            anchor: "stackel-determinant-closed-forms",
            tolerance: 1e-10,
            run: |cx| {
                let mut rng = cx.rng(8);
                let mut worst = 0.0f64;
                for variant in [
                    XiVariant::RationalNoSpectral,
                    XiVariant::TrigNoSpectral,
                    XiVariant::RationalSpectral,
                    XiVariant::TrigSpectral,
                    XiVariant::EllipticSpectral,
                ] {
                    for n in 2..=4usize {
                        let pos = cx.positions(&mut rng, n)?;
                        let z = variant
                            .needs_spectral()
                            .then(|| rng.complex_in((0.1, 0.6), (0.02, 0.2)));
                        let lu = xi_matrix(variant, z, &pos, cx.modulus(), cx.ctl())?.det();
                        let closed = xi_det_closed(variant, z, &pos, cx.modulus(), cx.ctl())?;
                        worst = worst.max((lu - closed).norm() / lu.norm().max(closed.norm()));
                    }
                }
                Ok(worst)
            },
        },
        Check {
            name: "xi-zero-at-origin",
            anchor: "stackel-determinant-zero",
            tolerance: 1e-9,
            run: |cx| {
                let mut rng = cx.rng(9);
                let mut worst = 0.0f64;
                for n in 2..=4usize {
                    let pos = cx.positions(&mut rng, n)?;
                    let zero = xi_matrix(
                        XiVariant::EllipticSpectral,
                        Some(C64::new(0.0, 0.0)),
                        &pos,
                        cx.modulus(),
                        cx.ctl(),
                    )?
                    .det();
                    let generic = xi_matrix(
                        XiVariant::EllipticSpectral,
                        Some(C64::new(0.41, 0.12)),
                        &pos,
                        cx.modulus(),
                        cx.ctl(),
                    )?
                    .det();
                    worst = worst.max(zero.norm() / generic.norm());
                }
                Ok(worst)
            },
        },
        Check {
            name: "hasegawa-factorization",
            anchor: "lax-intertwiner-factorization",
            tolerance: 1e-9,
            run: |cx| {
                let mut rng = cx.rng(10);
                let mut worst = 0.0f64;
                for n in 2..=3usize {
                    let state = random_state(cx, &mut rng, n)?;
                    let z = rng.complex_in((0.25, 0.5), (0.08, 0.2));
                    worst = worst.max(hasegawa_residual(z, &state, &cx.params)?);
                }
                Ok(worst)
            },
        },
        Check {
            name: "sklyanin-gauge",
            anchor: "sklyanin-gauge-conjugation",
            tolerance: 1e-9,
            run: |cx| {
                let mut rng = cx.rng(11);
                let mut worst = 0.0f64;
                for n in 2..=3usize {
                    let state = random_state(cx, &mut rng, n)?;
                    let z = rng.complex_in((0.25, 0.5), (0.08, 0.2));
                    let skl = sklyanin_lax(z, &state, &cx.params)?;
                    let g = g_matrix(z, &state.pos, cx.modulus(), cx.ctl())?;
                    let rs = classical_rs_lax(z, &state, &cx.params)?;
                    let conj = g.matmul(&rs).matmul(&g.inverse_guarded(CONDITION_LIMIT)?);
                    worst = worst.max(skl.rel_distance(&conj));
                }
                Ok(worst)
            },
        },
        Check {
            name: "quasi-periodicity",
            anchor: "lax-quasi-periodicity",
            tolerance: 1e-10,
            run: |cx| {
                let mut rng = cx.rng(12);
                let mut worst = 0.0f64;
                for n in 2..=3usize {
                    let state = random_state(cx, &mut rng, n)?;
                    let (r1, r2) =
                        quasi_periodicity_residuals(C64::new(0.33, 0.12), &state, &cx.params)?;
                    worst = worst.max(r1).max(r2);
                }
                Ok(worst)
            },
        },
        Check {
            name: "omega-collapse",
            anchor: "omega-zero-collapse",
            tolerance: 1e-12,
            run: |cx| {
                let mut params = cx.params.clone();
                params.omega = C64::new(0.0, 0.0);
                let mut rng = cx.rng(13);
                let mut worst = 0.0f64;
                for n in 2..=3usize {
                    let state = random_state(cx, &mut rng, n)?;
                    let z = C64::new(0.31, 0.17);
                    let lambda = C64::new(0.6, 0.2);
                    let averaged = averaged_lax(z, lambda, &state, &params)?;
                    let rs = classical_rs_lax(z, &state, &params)?;
                    let expected = ComplexMatrix::identity(n).sub(&rs.scale(lambda));
                    worst = worst.max(averaged.rel_distance(&expected));
                }
                Ok(worst)
            },
        },
        Check {
            name: "det-rep-trig",
            anchor: "trig-determinant-representation",
            tolerance: 1e-10,
            run: |cx| {
                let mut rng = cx.rng(14);
                let mut worst = 0.0f64;
                for n in 2..=3usize {
                    let x: Vec<C64> = (0..n).map(|_| rng.complex_annulus(0.6, 1.5)).collect();
                    let t = C64::new(1.23, 0.11);
                    for route in [TrigDetRoute::Vandermonde, TrigDetRoute::Pairing] {
                        worst =
                            worst.max(det_rep_residual_trig(&x, t, cx.params.omega, 2, route)?);
                    }
                }
                Ok(worst)
            },
        },
        Check {
            name: "det-rep-rational",
            anchor: "rational-determinant-representation",
            tolerance: 1e-10,
            run: |cx| {
                let mut rng = cx.rng(15);
                let mut worst = 0.0f64;
                for n in 2..=3usize {
                    let pos = cx.positions(&mut rng, n)?;
                    worst = worst
                        .max(det_rep_residual_rational(&pos, cx.params.eta, cx.params.omega, 2)?);
                }
                Ok(worst)
            },
        },
        Check {
            name: "det-rep-elliptic",
            anchor: "spectral-determinant-representation",
            tolerance: 1e-10,
            run: |cx| {
                let mut rng = cx.rng(16);
                let mut worst = 0.0f64;
                for n in 2..=3usize {
                    let pos = cx.positions(&mut rng, n)?;
                    let z = rng.complex_in((0.25, 0.5), (0.05, 0.2));
                    worst = worst.max(det_rep_residual_elliptic(
                        z,
                        &pos,
                        cx.params.eta,
                        cx.params.omega,
                        2,
                        cx.modulus(),
                        cx.ctl(),
                    )?);
                }
                Ok(worst)
            },
        },
        Check {
            name: "lax-det-rep",
            anchor: "averaged-lax-determinant-representation",
            tolerance: 1e-10,
            run: |cx| {
                let mut rng = cx.rng(17);
                let mut worst = 0.0f64;
                for n in 2..=3usize {
                    let cap = if n == 2 { 2 } else { 1 };
                    let pos = cx.positions(&mut rng, n)?;
                    let z = Some(rng.complex_in((0.25, 0.5), (0.05, 0.2)));
                    worst = worst.max(lax_det_rep_residual(
                        XiVariant::EllipticSpectral,
                        z,
                        &pos,
                        cx.params.eta,
                        cx.params.omega,
                        cap,
                        cx.modulus(),
                        cx.ctl(),
                    )?);
                }
                Ok(worst)
            },
        },
        Check {
            name: "conjugation",
            anchor: "generating-function-conjugation",
            tolerance: 1e-10,
            run: |cx| {
                let mut rng = cx.rng(18);
                let mut worst = 0.0f64;
                let pos = cx.positions(&mut rng, 2)?;
                for shift in shift_box(2, 2) {
                    worst = worst.max(conjugation_residual(
                        &shift,
                        &pos,
                        cx.params.eta,
                        cx.params.hbar,
                        cx.params.omega,
                        cx.modulus(),
                        cx.ctl(),
                    )?);
                }
                Ok(worst)
            },
        },
        Check {
            name: "dual-degeneration",
            anchor: "rational-spectral-degeneration",
            tolerance: 1e-5,
            run: |cx| {
                let mut rng = cx.rng(19);
                let pos = cx.positions(&mut rng, 2)?;
                dual_degeneration_residual(
                    C64::new(1e6, 0.0),
                    &pos,
                    cx.params.eta,
                    cx.params.omega,
                    2,
                    cx.modulus(),
                    cx.ctl(),
                )
            },
        },
        Check {
            name: "gl2-eigenvalue",
            anchor: "gl2-first-hamiltonian-eigenvalue",
            tolerance: 1e-10,
            run: |cx| {
                let mut rng = cx.rng(20);
                let lambda = Partition::new(vec![1]).expect("valid partition");
                let mut worst = 0.0f64;
                for _ in 0..20 {
                    let q = rng.complex_annulus(0.2, 0.9);
                    let t = rng.complex_annulus(0.2, 0.9);
                    let series = h1_eigenvalue_series(&lambda, 2, t, q, 2)?;
                    let order0 = -(ONE + t * q);
                    let order1 = (ONE + q * t) * (ONE + q * q * t * t) / (q * t);
                    worst = worst.max((series.coeff(0) - order0).norm() / order0.norm());
                    worst = worst.max((series.coeff(1) - order1).norm() / order1.norm());
                }
                Ok(worst)
            },
        },
        Check {
            name: "triangularity",
            anchor: "p0-triangularity-and-diagonal",
            tolerance: 1e-10,
            run: |cx| {
                let u = C64::new(0.37, 0.21);
                let t = C64::new(0.62, 0.07);
                let q = C64::new(0.45, -0.12);
                let mut worst = 0.0f64;
                for n_vars in 2..=3usize {
                    for degree in 1..=3usize {
                        let (basis, matrix) =
                            operator_matrix(u, t, q, cx.params.omega, n_vars, degree, 3, cx.seed)?;
                        let scale = matrix.max_abs().max(1e-30);
                        for (row, mu) in basis.iter().enumerate() {
                            for (col, lam) in basis.iter().enumerate() {
                                if dominance_cmp(mu, lam) == Some(Ordering::Greater) {
                                    worst = worst.max(matrix.get(row, col).norm() / scale);
                                }
                            }
                            let expected =
                                eigenvalue_product(u, mu, n_vars, t, q, 3).eval(cx.params.omega);
                            worst = worst.max(
                                (matrix.get(row, row) - expected).norm()
                                    / expected.norm().max(1e-30),
                            );
                        }
                    }
                }
                Ok(worst)
            },
        },
        Check {
            name: "commutativity",
            anchor: "p0-hamiltonian-commutativity",
            tolerance: 1e-10,
            run: |cx| commutator_residual(C64::new(0.6, 0.11), C64::new(0.52, -0.06), 2, 2, 2, cx.seed),
        },
        Check {
            name: "involution",
            anchor: "classical-involution",
            tolerance: 1e-6,
            run: |cx| {
                let flow = FlowParams::default();
                let state = cx.benign_phase_point(21, 2)?;
                let g1 = hamiltonian_gradient(1, flow.z0, &state, &cx.params, &flow)?;
                let g2 = hamiltonian_gradient(2, flow.z0, &state, &cx.params, &flow)?;
                Ok(bracket_of(&g1, &g2).norm() / (g1.norm() * g2.norm()).max(1e-30))
            },
        },
        Check {
            name: "manakov-triple",
            anchor: "manakov-l-a-b-triple",
            tolerance: 1e-6,
            run: |cx| {
                let flow = FlowParams::default();
                let state = cx.benign_phase_point(22, 2)?;
                let rep =
                    manakov_residual(1, flow.z0, C64::new(0.5, 0.25), &state, &cx.params, &flow)?;
                Ok(rep.residual_right_form.max(rep.trace_b.norm()))
            },
        },
        Check {
            name: "conservation",
            anchor: "det-l-conservation",
            tolerance: 1e-6,
            run: |cx| {
                let mut flow = FlowParams::default();
                flow.horizon = 0.2;
                flow.integrator_step = 4e-3;
                let state = cx.benign_phase_point(23, 2)?;
                let run = integrate_flow(1, flow.z0, &state, &cx.params, &flow, C64::new(0.5, 0.2))?;
                Ok(run.max_drift)
            },
        },
    ]
}

fn fay_worst(cx: &CheckContext, salt: u64, which: usize) -> Result<f64> {
    let mut rng = cx.rng(salt);
    let mut worst = 0.0f64;
    for _ in 0..40 {
        let z = rng.complex_in((0.1, 0.5), (0.02, 0.2));
        let w = rng.complex_in((-0.5, -0.1), (0.02, 0.2));
        let u1 = rng.complex_in((0.1, 0.4), (-0.2, -0.02));
        let u2 = rng.complex_in((-0.4, -0.1), (-0.2, -0.02));
        let rs = fay_residuals(z, w, u1, u2, cx.modulus(), cx.ctl())?;
        worst = worst.max([rs.0, rs.1, rs.2][which]);
    }
    Ok(worst)
}

fn random_state(cx: &CheckContext, rng: &mut SplitMix64, n: usize) -> Result<PhaseState> {
    let pos = cx.positions(rng, n)?;
    let mom = (0..n)
        .map(|_| rng.complex_in((-0.3, 0.3), (-0.2, 0.2)))
        .collect();
    PhaseState::new(pos, mom)
}

/// Run the selected checks (substring filters; empty = all), fanning out over
/// threads and assembling records in registry order.
pub fn run_checks(cx: &CheckContext, filters: &[String]) -> Result<Vec<CheckRecord>> {
    let selected: Vec<Check> = registry()
        .into_iter()
        .filter(|c| {
            filters.is_empty() || filters.iter().any(|f| c.name.contains(f.as_str()))
        })
        .collect();
    if selected.is_empty() {
        return Err(KernelError::InvalidParameter(format!(
            "no checks match the suite filters {filters:?}"
        )));
    }
    let results: Vec<Result<f64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|check| {
                let run = check.run;
                scope.spawn(move || run(cx))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("check panicked")).collect()
    });
    let mut records = Vec::with_capacity(selected.len());
    for (check, result) in selected.iter().zip(results) {
        let residual = result?;
        records.push(CheckRecord::new(check.name, check.anchor, residual, check.tolerance));
    }
    Ok(records)
}
