//! Classical limit: the Manakov L-matrix L(z,λ) = ℒ(z,1)⁻¹ℒ(z,λ), the
//! Hamiltonians extracted as λ-Laurent coefficients of det L at fixed generic
//! z, Poisson involution, Hamiltonian flow, and the L-A-B triple
//!
//!   dL/dt_k = [L, M_k(z,1)] + L·B_k,   B_k = M_k(z,λ) − M_k(z,1),
//!   M_k(z,λ) = ℒ(z,λ)⁻¹ dℒ(z,λ)/dt_k,   tr B_k = 0,
//!
//! whose conserved quantity is det L(z,λ) itself.
//!
//! Every derivative is a guarded central difference with one Richardson
//! refinement; the λ-coefficients come from a discrete Fourier transform over
//! a circle whose radius keeps the Laurent series well inside its annulus of
//! convergence, with an aliasing check by sample doubling.

use crate::error::{KernelError, Result};
use crate::intertwiner::{Positions, XiVariant};
use crate::lax::{AveragedLaxFamily, ModelParams, PhaseState};
use crate::linalg::{ComplexMatrix, CONDITION_LIMIT};
use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

const ONE: C64 = C64::new(1.0, 0.0);

/// Flow and extraction settings for the classical layer.
#[derive(Debug, Clone)]
pub struct FlowParams {
    /// Which Hamiltonian H_k generates the flow.
    pub hamiltonian_index: i64,
    /// Generic spectral point at which Hamiltonians are extracted.
    pub z0: C64,
    /// Radius of the λ-circle for the Fourier extraction.
    pub lambda_radius: f64,
    /// Number of Fourier samples (power of two).
    pub fourier_samples: usize,
    /// Central-difference step.
    pub derivative_step: f64,
    /// RK4 time step.
    pub integrator_step: f64,
    /// Integration horizon.
    pub horizon: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            hamiltonian_index: 1,
            z0: C64::new(0.31, 0.17),
            lambda_radius: 0.8,
            fourier_samples: 64,
            derivative_step: 1e-5,
            integrator_step: 1e-3,
            horizon: 1.0,
        }
    }
}

impl FlowParams {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_radius <= 0.0 {
            return Err(KernelError::InvalidParameter("lambda radius must be positive".into()));
        }
        if self.fourier_samples < 8 || !self.fourier_samples.is_power_of_two() {
            return Err(KernelError::InvalidParameter(
                "fourier_samples must be a power of two, at least 8".into(),
            ));
        }
        if self.derivative_step <= 0.0 || self.integrator_step <= 0.0 || self.horizon <= 0.0 {
            return Err(KernelError::InvalidParameter(
                "steps and horizon must be positive".into(),
            ));
        }
        Ok(())
    }

    fn lambda_bound(&self) -> f64 {
        self.lambda_radius.max(1.0 / self.lambda_radius)
    }
}

/// The Manakov L-matrix L(z,λ) = ℒ(z,1)⁻¹ ℒ(z,λ).
pub fn manakov_l(
    z: C64,
    lambda: C64,
    state: &PhaseState,
    params: &ModelParams,
) -> Result<ComplexMatrix> {
    let bound = crate::lax::lambda_bound_for(lambda);
    let family = AveragedLaxFamily::build(XiVariant::EllipticSpectral, Some(z), state, params, bound)?;
    let at_one = family.averaged(ONE);
    let inv = at_one.inverse_guarded(CONDITION_LIMIT)?;
    Ok(inv.matmul(&family.averaged(lambda)))
}

/// det L(z,λ) = det ℒ(z,λ) / det ℒ(z,1) through a prebuilt family.
fn det_ratio(family: &AveragedLaxFamily, det_one: C64, lambda: C64) -> C64 {
    family.averaged(lambda).det() / det_one
}

fn fourier_coefficient(
    family: &AveragedLaxFamily,
    det_one: C64,
    k: i64,
    radius: f64,
    samples: usize,
) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for s in 0..samples {
        let phi = TAU * s as f64 / samples as f64;
        let lambda = C64::from_polar(radius, phi);
        let phase = C64::from_polar(radius.powi(k as i32), k as f64 * phi);
        acc += det_ratio(family, det_one, lambda) / phase;
    }
    acc / samples as f64
}

/// Absolute/relative threshold above which sample doubling counts as aliased.
const ALIASING_TOLERANCE: f64 = 1e-9;

struct Extractor {
    family: AveragedLaxFamily,
    det_one: C64,
    radius: f64,
    samples: usize,
}

impl Extractor {
    fn build(z: C64, state: &PhaseState, params: &ModelParams, flow: &FlowParams) -> Result<Self> {
        let family = AveragedLaxFamily::build(
            XiVariant::EllipticSpectral,
            Some(z),
            state,
            params,
            flow.lambda_bound(),
        )?;
        let at_one = family.averaged(ONE);
        let det_one = at_one.det();
        if !(det_one.norm() > 1e-250) {
            return Err(KernelError::NearSingular { magnitude: det_one.norm() });
        }
        Ok(Self {
            family,
            det_one,
            radius: flow.lambda_radius,
            samples: flow.fourier_samples,
        })
    }

    fn coefficient(&self, k: i64) -> C64 {
        fourier_coefficient(&self.family, self.det_one, k, self.radius, self.samples)
    }
}

/// H_k(z): the coefficient of λ^k in det L(z,λ), extracted on |λ| = r and
/// cross-checked by doubling the sample count.
pub fn hamiltonian_coeff(
    k: i64,
    z: C64,
    state: &PhaseState,
    params: &ModelParams,
    flow: &FlowParams,
) -> Result<C64> {
    flow.validate()?;
    if flow.fourier_samples < 4 * k.unsigned_abs() as usize {
        return Err(KernelError::InvalidParameter(format!(
            "{} Fourier samples cannot resolve k = {k}",
            flow.fourier_samples
        )));
    }
    let ex = Extractor::build(z, state, params, flow)?;
    let coarse = ex.coefficient(k);
    let fine = fourier_coefficient(&ex.family, ex.det_one, k, ex.radius, 2 * ex.samples);
    let delta = (coarse - fine).norm() / fine.norm().max(1.0);
    if delta > ALIASING_TOLERANCE {
        return Err(KernelError::Aliasing { delta });
    }
    Ok(fine)
}

fn perturbed_q(state: &PhaseState, i: usize, delta: f64) -> Result<PhaseState> {
    let mut q = state.pos.q().to_vec();
    q[i] += delta;
    PhaseState::new(Positions::new(q)?, state.mom.clone())
}

fn perturbed_p(state: &PhaseState, i: usize, delta: f64) -> PhaseState {
    let mut mom = state.mom.clone();
    mom[i] += delta;
    PhaseState {
        pos: state.pos.clone(),
        mom,
    }
}

/// Relative-disagreement ceiling for the Richardson refinement.
const RICHARDSON_TOLERANCE: f64 = 1e-5;

fn richardson<F>(f: F, h: f64) -> Result<C64>
where
    F: Fn(f64) -> Result<C64>,
{
    let coarse = (f(h)? - f(-h)?) / (2.0 * h);
    let half = h / 2.0;
    let fine = (f(half)? - f(-half)?) / (2.0 * half);
    let refined = (4.0 * fine - coarse) / 3.0;
    let disagreement = (fine - coarse).norm() / refined.norm().max(0.1);
    if disagreement > RICHARDSON_TOLERANCE {
        return Err(KernelError::DerivativeUnstable { delta: disagreement });
    }
    Ok(refined)
}

/// Gradient of H_k with respect to every coordinate and momentum.
#[derive(Debug, Clone)]
pub struct HamiltonianGradient {
    pub dq: Vec<C64>,
    pub dp: Vec<C64>,
}

impl HamiltonianGradient {
    pub fn norm(&self) -> f64 {
        self.dq
            .iter()
            .chain(&self.dp)
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub fn hamiltonian_gradient(
    k: i64,
    z: C64,
    state: &PhaseState,
    params: &ModelParams,
    flow: &FlowParams,
) -> Result<HamiltonianGradient> {
    flow.validate()?;
    let n = state.len();
    let h = flow.derivative_step;
    let eval = |s: &PhaseState| -> Result<C64> {
        Ok(Extractor::build(z, s, params, flow)?.coefficient(k))
    };
    let mut dq = Vec::with_capacity(n);
    let mut dp = Vec::with_capacity(n);
    for i in 0..n {
        dq.push(richardson(|d| eval(&perturbed_q(state, i, d)?), h)?);
        dp.push(richardson(|d| eval(&perturbed_p(state, i, d)), h)?);
    }
    Ok(HamiltonianGradient { dq, dp })
}

/// Right-hand side of the Hamiltonian equations of motion:
/// dq_i/dt = ∂H_k/∂p_i, dp_i/dt = −∂H_k/∂q_i.
pub fn eom_rhs(
    k: i64,
    z: C64,
    state: &PhaseState,
    params: &ModelParams,
    flow: &FlowParams,
) -> Result<(Vec<C64>, Vec<C64>)> {
    let grad = hamiltonian_gradient(k, z, state, params, flow)?;
    let dp: Vec<C64> = grad.dq.iter().map(|v| -v).collect();
    Ok((grad.dp, dp))
}

/// Canonical Poisson bracket {H_{k1}, H_{k2}} at the given phase point.
pub fn poisson_bracket(
    k1: i64,
    k2: i64,
    z: C64,
    state: &PhaseState,
    params: &ModelParams,
    flow: &FlowParams,
) -> Result<C64> {
    let g1 = hamiltonian_gradient(k1, z, state, params, flow)?;
    let g2 = hamiltonian_gradient(k2, z, state, params, flow)?;
    Ok(bracket_of(&g1, &g2))
}

pub fn bracket_of(g1: &HamiltonianGradient, g2: &HamiltonianGradient) -> C64 {
    g1.dp
        .iter()
        .zip(&g1.dq)
        .zip(g2.dp.iter().zip(&g2.dq))
        .map(|((p1, q1), (p2, q2))| p1 * q2 - q1 * p2)
        .sum()
}

/// Residuals of the Manakov representation at one phase point.
#[derive(Debug, Clone)]
pub struct ManakovReport {
    /// dL/dt vs [L, M(z,λ)] + B·L.
    pub residual_adjoint_form: f64,
    /// dL/dt vs [L, M(z,1)] + L·B.
    pub residual_right_form: f64,
    /// dL/dt vs L·M(z,λ) − M(z,1)·L.
    pub residual_plain_form: f64,
    pub trace_b: C64,
}

fn directional_matrix_derivative<F>(f: F, direction_scale: f64, h: f64) -> Result<ComplexMatrix>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    let step = h / direction_scale.max(1.0);
    let coarse = f(step)?.sub(&f(-step)?).scale(C64::new(1.0 / (2.0 * step), 0.0));
    let half = step / 2.0;
    let fine = f(half)?.sub(&f(-half)?).scale(C64::new(1.0 / (2.0 * half), 0.0));
    let refined = fine.scale(C64::new(4.0 / 3.0, 0.0)).sub(&coarse.scale(C64::new(1.0 / 3.0, 0.0)));
    let disagreement = fine.sub(&coarse).max_abs() / refined.max_abs().max(0.1);
    if disagreement > RICHARDSON_TOLERANCE {
        return Err(KernelError::DerivativeUnstable { delta: disagreement });
    }
    Ok(refined)
}

fn state_along(state: &PhaseState, flow_dir: &(Vec<C64>, Vec<C64>), s: f64) -> Result<PhaseState> {
    let q: Vec<C64> = state
        .pos
        .q()
        .iter()
        .zip(&flow_dir.0)
        .map(|(&qv, &dv)| qv + s * dv)
        .collect();
    let p: Vec<C64> = state
        .mom
        .iter()
        .zip(&flow_dir.1)
        .map(|(&pv, &dv)| pv + s * dv)
        .collect();
    PhaseState::new(Positions::new(q)?, p)
}

/// Check the L-A-B triple for the flow of H_k at (z, λ): the time derivative
/// of L along the Hamiltonian vector field against the three equivalent
/// right-hand sides, plus tr B.
pub fn manakov_residual(
    k: i64,
    z: C64,
    lambda: C64,
    state: &PhaseState,
    params: &ModelParams,
    flow: &FlowParams,
) -> Result<ManakovReport> {
    flow.validate()?;
    let direction = eom_rhs(k, z, state, params, flow)?;
    let dir_scale = direction
        .0
        .iter()
        .chain(&direction.1)
        .map(|v| v.norm())
        .fold(0.0, f64::max);

    let h = flow.derivative_step;
    let l_dot = directional_matrix_derivative(
        |s| manakov_l(z, lambda, &state_along(state, &direction, s)?, params),
        dir_scale,
        h,
    )?;
    let family_at = |s: f64| -> Result<AveragedLaxFamily> {
        AveragedLaxFamily::build(
            XiVariant::EllipticSpectral,
            Some(z),
            &state_along(state, &direction, s)?,
            params,
            crate::lax::lambda_bound_for(lambda),
        )
    };
    let curly_dot_lambda =
        directional_matrix_derivative(|s| Ok(family_at(s)?.averaged(lambda)), dir_scale, h)?;
    let curly_dot_one =
        directional_matrix_derivative(|s| Ok(family_at(s)?.averaged(ONE)), dir_scale, h)?;

    let family = family_at(0.0)?;
    let curly_lambda = family.averaged(lambda);
    let curly_one = family.averaged(ONE);
    let m_lambda = curly_lambda
        .inverse_guarded(CONDITION_LIMIT)?
        .matmul(&curly_dot_lambda);
    let m_one = curly_one.inverse_guarded(CONDITION_LIMIT)?.matmul(&curly_dot_one);
    let b = m_lambda.sub(&m_one);
    let l = curly_one.inverse_guarded(CONDITION_LIMIT)?.matmul(&curly_lambda);

    let commut = |a: &ComplexMatrix, bm: &ComplexMatrix| a.matmul(bm).sub(&bm.matmul(a));
    let form_adjoint = commut(&l, &m_lambda).add(&b.matmul(&l));
    let form_right = commut(&l, &m_one).add(&l.matmul(&b));
    let form_plain = l.matmul(&m_lambda).sub(&m_one.matmul(&l));

    // the problem scale keeps the residual meaningful when both sides vanish
    // (λ = 1 makes L the identity and every form zero)
    let problem_scale = (l.max_abs() * m_lambda.max_abs()).max(l_dot.max_abs());
    let res = |form: &ComplexMatrix| -> f64 {
        let scale = problem_scale.max(form.max_abs()).max(1e-30);
        l_dot.sub(form).max_abs() / scale
    };
    Ok(ManakovReport {
        residual_adjoint_form: res(&form_adjoint),
        residual_right_form: res(&form_right),
        residual_plain_form: res(&form_plain),
        trace_b: b.trace(),
    })
}

/// One sample of the integrated flow.
#[derive(Debug, Clone)]
pub struct FlowSample {
    pub time: f64,
    pub q: Vec<C64>,
    pub p: Vec<C64>,
    /// |det L(z,λ*) − det L(z,λ*)|_{t=0}| / |·|_{t=0}
    pub drift: f64,
}

#[derive(Debug, Clone)]
pub struct FlowReport {
    pub trajectory: Vec<FlowSample>,
    pub max_drift: f64,
}

/// Integrate the H_k flow with fixed-step RK4 and monitor conservation of
/// det L(z, λ*) along the trajectory.
pub fn integrate_flow(
    k: i64,
    z: C64,
    state0: &PhaseState,
    params: &ModelParams,
    flow: &FlowParams,
    probe_lambda: C64,
) -> Result<FlowReport> {
    flow.validate()?;
    let dt = flow.integrator_step;
    let steps = (flow.horizon / dt).round() as usize;
    let floor = state0.pos.min_separation() * 0.25;

    let det_probe = |s: &PhaseState| -> Result<C64> {
        let family = AveragedLaxFamily::build(
            XiVariant::EllipticSpectral,
            Some(z),
            s,
            params,
            crate::lax::lambda_bound_for(probe_lambda),
        )?;
        let d1 = family.averaged(ONE).det();
        if !(d1.norm() > 1e-250) {
            return Err(KernelError::NearSingular { magnitude: d1.norm() });
        }
        Ok(family.averaged(probe_lambda).det() / d1)
    };

    let rhs = |s: &PhaseState| eom_rhs(k, z, s, params, flow);
    let advance = |s: &PhaseState, dir: &(Vec<C64>, Vec<C64>), h: f64| -> Result<PhaseState> {
        state_along(s, dir, h)
    };

    let reference = det_probe(state0)?;
    let mut state = state0.clone();
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(FlowSample {
        time: 0.0,
        q: state.pos.q().to_vec(),
        p: state.mom.clone(),
        drift: 0.0,
    });
    let mut max_drift = 0.0f64;

    for step in 1..=steps {
        let k1 = rhs(&state).map_err(|e| guard_at(step, e))?;
        let k2 = rhs(&advance(&state, &k1, dt / 2.0).map_err(|e| guard_at(step, e))?)
            .map_err(|e| guard_at(step, e))?;
        let k3 = rhs(&advance(&state, &k2, dt / 2.0).map_err(|e| guard_at(step, e))?)
            .map_err(|e| guard_at(step, e))?;
        let k4 = rhs(&advance(&state, &k3, dt).map_err(|e| guard_at(step, e))?)
            .map_err(|e| guard_at(step, e))?;
        let combine = |i: usize, which: usize| -> C64 {
            let (a, b, c, d) = match which {
                0 => (k1.0[i], k2.0[i], k3.0[i], k4.0[i]),
                _ => (k1.1[i], k2.1[i], k3.1[i], k4.1[i]),
            };
            (a + 2.0 * b + 2.0 * c + d) / 6.0
        };
        let n = state.len();
        let dir: (Vec<C64>, Vec<C64>) = (
            (0..n).map(|i| combine(i, 0)).collect(),
            (0..n).map(|i| combine(i, 1)).collect(),
        );
        state = advance(&state, &dir, dt).map_err(|e| guard_at(step, e))?;
        if state.pos.min_separation() < floor {
            return Err(KernelError::GuardTripped {
                step,
                reason: format!(
                    "coordinate separation fell below {floor:.3e}"
                ),
            });
        }
        let det_now = det_probe(&state).map_err(|e| guard_at(step, e))?;
        let drift = (det_now - reference).norm() / reference.norm();
        max_drift = max_drift.max(drift);
        trajectory.push(FlowSample {
            time: step as f64 * dt,
            q: state.pos.q().to_vec(),
            p: state.mom.clone(),
            drift,
        });
    }
    Ok(FlowReport {
        trajectory,
        max_drift,
    })
}

fn guard_at(step: usize, e: KernelError) -> KernelError {
    match e {
        KernelError::GuardTripped { .. } => e,
        other => KernelError::GuardTripped {
            step,
            reason: other.to_string(),
        },
    }
}
