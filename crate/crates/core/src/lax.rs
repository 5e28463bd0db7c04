//! Ruijsenaars-Schneider Lax matrices in all five coordinate flavours, the
//! theta-weighted average ℒ(z,λ) over integer-scaled couplings, the Hasegawa
//! factorization through the intertwiner, the Sklyanin gauge, the
//! theta-operator form Θ(z,λ), and Baxter-Belavin R-matrix weights.
//!
//! The scalar entry of the elliptic Lax matrix at coupling η̃ is
//!
//!   L_ij = ϑ(−η̃)ϑ(z + q_ij − η̃) / (ϑ(z)ϑ(q_ij − η̃)) · ∏_{k≠j} ϑ(q_jk + η̃)/ϑ(q_jk),
//!
//! with the diagonal understood through the cancellation
//! ϑ(−η̃)/ϑ(q_jj − η̃) = 1, so coupling 0 collapses every family to the
//! identity matrix exactly. Classically the shift operator in column j
//! becomes the factor e^{p_j / c}.

use crate::elliptic::{
    eisenstein_e1, int_power, jacobi_theta, kronecker_phi, theta_char, Modulus, SeriesControl,
};
use crate::error::{KernelError, Result};
use crate::intertwiner::{g_matrix, xi_matrix, Positions, XiVariant};
use crate::linalg::{ComplexMatrix, CONDITION_LIMIT};
use num_complex::Complex64 as C64;

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// Absolute floor below which a denominator counts as singular.
const DENOM_FLOOR: f64 = 1e-280;

/// All scalar moduli and truncation settings of the model.
#[derive(Debug, Clone)]
pub struct ModelParams {
    /// Coupling constant η (t = e^η).
    pub eta: C64,
    /// Planck constant ħ (q = e^ħ); only the quantum tables use it.
    pub hbar: C64,
    /// Light-speed parameter of the classical model.
    pub c_light: C64,
    /// Coordinate modular parameter τ.
    pub modulus: Modulus,
    /// Momentum ellipticity weight ω = e^{2πiτ̃}, |ω| < 1.
    pub omega: C64,
    /// Default spectral parameter of the generating function.
    pub lambda: C64,
    /// Cap M on the coupling-scaling index of every average.
    pub shift_cap: usize,
    pub control: SeriesControl,
}

impl ModelParams {
    pub fn new(eta: C64, hbar: C64, c_light: C64, modulus: Modulus, omega: C64) -> Result<Self> {
        if omega.norm() >= 1.0 {
            return Err(KernelError::InvalidParameter(format!(
                "|omega| = {} must be < 1",
                omega.norm()
            )));
        }
        if c_light.norm() == 0.0 {
            return Err(KernelError::InvalidParameter("c must be nonzero".into()));
        }
        Ok(Self {
            eta,
            hbar,
            c_light,
            modulus,
            omega,
            lambda: C64::new(0.0, 0.0),
            shift_cap: 12,
            control: SeriesControl::default(),
        })
    }

    /// t = e^η in the trigonometric convention.
    pub fn t_trig(&self) -> C64 {
        self.eta.exp()
    }

    /// q = e^ħ in the trigonometric convention.
    pub fn q_trig(&self) -> C64 {
        self.hbar.exp()
    }
}

/// Particle coordinates and momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub pos: Positions,
    pub mom: Vec<C64>,
}

impl PhaseState {
    pub fn new(pos: Positions, mom: Vec<C64>) -> Result<Self> {
        if mom.len() != pos.len() {
            return Err(KernelError::InvalidParameter(format!(
                "{} momenta for {} coordinates",
                mom.len(),
                pos.len()
            )));
        }
        Ok(Self { pos, mom })
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    /// e^{p_j / c} for every particle.
    pub fn momentum_factors(&self, c_light: C64) -> Vec<C64> {
        self.mom.iter().map(|&p| (p / c_light).exp()).collect()
    }
}

/// ω^{(n²−n)/2} with 0⁰ = 1, so ω = 0 collapses averages exactly.
pub fn omega_weight(omega: C64, n: i64) -> C64 {
    int_power(omega, (n * n - n) / 2)
}

fn guarded_div(num: C64, den: C64) -> Result<C64> {
    if den.norm() < DENOM_FLOOR {
        return Err(KernelError::NearSingular {
            magnitude: den.norm(),
        });
    }
    Ok(num / den)
}

/// Scalar coefficient of the shift operator in entry (i, j) of the RS Lax
/// matrix for the given variant, at coupling η̃ (0-based indices).
///
/// The shift itself (e^{ħ∂_{q_j}} quantum, e^{p_j/c} classical) is bookkept
/// by the caller.
pub fn rs_lax_coeff(
    variant: XiVariant,
    z: Option<C64>,
    pos: &Positions,
    coupling: C64,
    i: usize,
    j: usize,
    modulus: &Modulus,
    ctl: &SeriesControl,
) -> Result<C64> {
    let n = pos.len();
    let q = pos.q();
    match variant {
        XiVariant::EllipticSpectral => {
            let zv = require_z(variant, z)?;
            let th = |w| jacobi_theta(w, modulus, ctl);
            let mut prod = ONE;
            for k in 0..n {
                if k != j {
                    prod *= guarded_div(th(q[j] - q[k] + coupling)?, th(q[j] - q[k])?)?;
                }
            }
            if i == j {
                Ok(guarded_div(th(zv - coupling)?, th(zv)?)? * prod)
            } else {
                let num = th(-coupling)? * th(zv + q[i] - q[j] - coupling)?;
                let den = th(zv)? * th(q[i] - q[j] - coupling)?;
                Ok(guarded_div(num, den)? * prod)
            }
        }
        XiVariant::TrigNoSpectral => {
            reject_z(variant, z)?;
            let x = pos.x_trig();
            let t = coupling.exp();
            if i == j {
                let mut prod = ONE;
                for k in 0..n {
                    if k != i {
                        prod *= guarded_div(t * x[i] - x[k], x[i] - x[k])?;
                    }
                }
                Ok(prod)
            } else {
                let mut v = guarded_div((ONE - t) * x[j], x[i] - x[j])?;
                for k in 0..n {
                    if k != i && k != j {
                        v *= guarded_div(t * x[j] - x[k], x[j] - x[k])?;
                    }
                }
                Ok(v)
            }
        }
        XiVariant::TrigSpectral => {
            let zv = require_z(variant, z)?;
            let coth = |w: C64| guarded_div(w.cosh(), w.sinh());
            let mut prod = ONE;
            for k in 0..n {
                if k != j {
                    prod *= guarded_div((q[j] - q[k] + coupling).sinh(), (q[j] - q[k]).sinh())?;
                }
            }
            let front = (-(n as f64 - 2.0) * coupling).exp();
            if i == j {
                // −sinh(η̃)(coth(−η̃) + coth z) = cosh(η̃) − sinh(η̃) coth z
                Ok(front * (coupling.cosh() - coupling.sinh() * coth(zv)?) * prod)
            } else {
                let bracket = coth(q[i] - q[j] - coupling)? + coth(zv)?;
                Ok(-front * coupling.sinh() * bracket * prod)
            }
        }
        XiVariant::RationalNoSpectral => {
            reject_z(variant, z)?;
            let mut prod = ONE;
            for k in 0..n {
                if k != j {
                    prod *= guarded_div(q[j] - q[k] + coupling, q[j] - q[k])?;
                }
            }
            if i == j {
                Ok(prod)
            } else {
                Ok(guarded_div(-coupling, q[i] - q[j] - coupling)? * prod)
            }
        }
        XiVariant::RationalSpectral => {
            let zv = require_z(variant, z)?;
            let mut prod = ONE;
            for k in 0..n {
                if k != j {
                    prod *= guarded_div(q[j] - q[k] + coupling, q[j] - q[k])?;
                }
            }
            if i == j {
                Ok((ONE - guarded_div(coupling, zv)?) * prod)
            } else {
                let bracket = guarded_div(ONE, zv)? + guarded_div(ONE, q[i] - q[j] - coupling)?;
                Ok(-coupling * bracket * prod)
            }
        }
    }
}

fn require_z(variant: XiVariant, z: Option<C64>) -> Result<C64> {
    z.ok_or(KernelError::VariantMismatch {
        variant: variant.name(),
        reason: "spectral parameter required",
    })
}

fn reject_z(variant: XiVariant, z: Option<C64>) -> Result<()> {
    if z.is_some() {
        return Err(KernelError::VariantMismatch {
            variant: variant.name(),
            reason: "spectral parameter not accepted",
        });
    }
    Ok(())
}

/// Full coefficient matrix of the RS Lax operator at the given coupling
/// (momentum/shift factors excluded).
pub fn rs_lax_matrix(
    variant: XiVariant,
    z: Option<C64>,
    pos: &Positions,
    coupling: C64,
    modulus: &Modulus,
    ctl: &SeriesControl,
) -> Result<ComplexMatrix> {
    let n = pos.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, rs_lax_coeff(variant, z, pos, coupling, i, j, modulus, ctl)?);
        }
    }
    Ok(m)
}

/// Classical elliptic RS Lax matrix: coefficient matrix at coupling η with
/// the factor e^{p_j/c} in column j.
pub fn classical_rs_lax(z: C64, state: &PhaseState, params: &ModelParams) -> Result<ComplexMatrix> {
    let coeff = rs_lax_matrix(
        XiVariant::EllipticSpectral,
        Some(z),
        &state.pos,
        params.eta,
        &params.modulus,
        &params.control,
    )?;
    Ok(coeff.scale_cols(&state.momentum_factors(params.c_light)))
}

/// Residuals of the quasi-periodicity of the classical Lax matrix:
/// (L(z+1) vs L(z),  L(z+τ) vs e^{2πiη}·Ad_{exp(−2πi diag q)} L(z)).
pub fn quasi_periodicity_residuals(
    z: C64,
    state: &PhaseState,
    params: &ModelParams,
) -> Result<(f64, f64)> {
    let tau = params.modulus.tau();
    let base = classical_rs_lax(z, state, params)?;
    let shifted_one = classical_rs_lax(z + ONE, state, params)?;
    let r1 = shifted_one.rel_distance(&base);

    let shifted_tau = classical_rs_lax(z + tau, state, params)?;
    let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
    let phase = (two_pi_i * params.eta).exp();
    let n = state.len();
    let mut expected = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let ad = (-two_pi_i * (state.pos.q()[i] - state.pos.q()[j])).exp();
            expected.set(i, j, phase * ad * base.get(i, j));
        }
    }
    let r2 = shifted_tau.rel_distance(&expected);
    Ok((r1, r2))
}

/// Family of coupling-scaled classical Lax matrices
/// L^RS(z, nη, n·p/c), n = −M..M, cached so the weighted average can be
/// re-evaluated cheaply at many λ (the momentum factors enter column-wise).
#[derive(Debug, Clone)]
pub struct AveragedLaxFamily {
    m_eff: i64,
    /// coefficient matrices for n = −m_eff ..= m_eff (no momentum factors)
    coeff: Vec<ComplexMatrix>,
    exp_pc: Vec<C64>,
    omega: C64,
    dim: usize,
}

impl AveragedLaxFamily {
    /// Build the family for the given variant. `lambda_bound` is the largest
    /// |λ| (and 1/|λ|) the average will be evaluated at; it enters the
    /// truncation bound on the dropped tail.
    pub fn build(
        variant: XiVariant,
        z: Option<C64>,
        state: &PhaseState,
        params: &ModelParams,
        lambda_bound: f64,
    ) -> Result<Self> {
        let exp_pc = state.momentum_factors(params.c_light);
        let max_re_pc = state
            .mom
            .iter()
            .map(|&p| (p / params.c_light).re.abs())
            .fold(0.0, f64::max);
        let m_eff = effective_cap(
            params.omega.norm(),
            lambda_bound,
            max_re_pc,
            params.shift_cap,
            params.control.tail_tolerance,
        )?;
        let n = state.len();
        let mut coeff = Vec::with_capacity((2 * m_eff + 1) as usize);
        for k in -m_eff..=m_eff {
            if k == 0 {
                coeff.push(ComplexMatrix::identity(n));
                continue;
            }
            let coupling = params.eta * k as f64;
            coeff.push(rs_lax_matrix(variant, z, &state.pos, coupling, &params.modulus, &params.control)?);
        }
        Ok(Self {
            m_eff,
            coeff,
            exp_pc,
            omega: params.omega,
            dim: n,
        })
    }

    pub fn effective_cap(&self) -> i64 {
        self.m_eff
    }

    /// ℒ(z,λ) = Σ_n (−λ)^n ω^{(n²−n)/2} L^RS(z, nη, n·p/c).
    pub fn averaged(&self, lambda: C64) -> ComplexMatrix {
        if lambda == ZERO {
            return ComplexMatrix::identity(self.dim);
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (idx, base) in self.coeff.iter().enumerate() {
            let k = idx as i64 - self.m_eff;
            let weight = int_power(-lambda, k) * omega_weight(self.omega, k);
            if weight == ZERO {
                continue;
            }
            let cols: Vec<C64> = self.exp_pc.iter().map(|&e| weight * int_power(e, k)).collect();
            out = out.add(&base.scale_cols(&cols));
        }
        out
    }
}

/// Smallest M ≤ cap whose dropped tail
/// |ω|^{((M+1)²−(M+1))/2}·B^{M+1}·e^{(M+1)·max|Re p/c|} is below tolerance.
fn effective_cap(
    omega_abs: f64,
    lambda_bound: f64,
    max_re_pc: f64,
    cap: usize,
    tol: f64,
) -> Result<i64> {
    if cap == 0 {
        return Err(KernelError::InvalidParameter("shift cap must be ≥ 1".into()));
    }
    let b = lambda_bound.max(1.0);
    for m in 1..=cap as i64 {
        let k = (m + 1) as f64;
        let tail = omega_abs.powf(k * (k - 1.0) / 2.0) * b.powf(k) * (k * max_re_pc).exp();
        if tail < tol {
            return Ok(m);
        }
    }
    Err(KernelError::Truncation(format!(
        "averaging tail stays above {tol} at cap {cap} (|omega| = {omega_abs})"
    )))
}

/// ℒ(z,λ) for the elliptic classical model (one-shot convenience).
pub fn averaged_lax(
    z: C64,
    lambda: C64,
    state: &PhaseState,
    params: &ModelParams,
) -> Result<ComplexMatrix> {
    let bound = lambda_bound_for(lambda);
    let family = AveragedLaxFamily::build(XiVariant::EllipticSpectral, Some(z), state, params, bound)?;
    Ok(family.averaged(lambda))
}

pub(crate) fn lambda_bound_for(lambda: C64) -> f64 {
    let m = lambda.norm();
    if m == 0.0 {
        1.0
    } else {
        m.max(1.0 / m)
    }
}

/// Entrywise relative residual of the Hasegawa factorization
/// L^RS(z) = g⁻¹(z) g(z−Nη) e^{P/c}.
pub fn hasegawa_residual(z: C64, state: &PhaseState, params: &ModelParams) -> Result<f64> {
    let direct = classical_rs_lax(z, state, params)?;
    let factored = hasegawa_product(z, state, params)?;
    Ok(direct.rel_distance(&factored))
}

/// g⁻¹(z) g(z−Nη) e^{P/c}.
pub fn hasegawa_product(z: C64, state: &PhaseState, params: &ModelParams) -> Result<ComplexMatrix> {
    let n = state.len() as f64;
    let g_here = g_matrix(z, &state.pos, &params.modulus, &params.control)?;
    let g_shift = g_matrix(z - n * params.eta, &state.pos, &params.modulus, &params.control)?;
    let g_inv = g_here.inverse_guarded(CONDITION_LIMIT)?;
    Ok(g_inv
        .matmul(&g_shift)
        .scale_cols(&state.momentum_factors(params.c_light)))
}

/// G(z) = Ξ(z) D⁻¹ e^{zP/(Ncη)}.
pub fn momentum_dressed_g(z: C64, state: &PhaseState, params: &ModelParams) -> Result<ComplexMatrix> {
    if params.eta.norm() == 0.0 {
        return Err(KernelError::InvalidParameter(
            "momentum dressing needs eta ≠ 0".into(),
        ));
    }
    let g = g_matrix(z, &state.pos, &params.modulus, &params.control)?;
    let n = state.len() as f64;
    let dress: Vec<C64> = state
        .mom
        .iter()
        .map(|&p| (z * p / (n * params.c_light * params.eta)).exp())
        .collect();
    Ok(g.scale_cols(&dress))
}

/// Θ(z,λ) = Σ_k (−λ)^k ω^{(k²−k)/2} g(z−kNη) e^{kP/c} e^{zP/(Ncη)}.
pub fn theta_operator(
    z: C64,
    lambda: C64,
    state: &PhaseState,
    params: &ModelParams,
) -> Result<ComplexMatrix> {
    if params.eta.norm() == 0.0 {
        return Err(KernelError::InvalidParameter(
            "theta operator needs eta ≠ 0".into(),
        ));
    }
    let n = state.len();
    let nf = n as f64;
    let exp_pc = state.momentum_factors(params.c_light);
    let max_re_pc = state
        .mom
        .iter()
        .map(|&p| (p / params.c_light).re.abs())
        .fold(0.0, f64::max);
    let m_eff = effective_cap(
        params.omega.norm(),
        lambda_bound_for(lambda),
        max_re_pc,
        params.shift_cap,
        params.control.tail_tolerance,
    )?;
    let dress: Vec<C64> = state
        .mom
        .iter()
        .map(|&p| (z * p / (nf * params.c_light * params.eta)).exp())
        .collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in -m_eff..=m_eff {
        let weight = if lambda == ZERO {
            if k == 0 {
                ONE
            } else {
                ZERO
            }
        } else {
            int_power(-lambda, k) * omega_weight(params.omega, k)
        };
        if weight == ZERO {
            continue;
        }
        let g = g_matrix(z - nf * params.eta * k as f64, &state.pos, &params.modulus, &params.control)?;
        let cols: Vec<C64> = (0..n)
            .map(|j| weight * int_power(exp_pc[j], k) * dress[j])
            .collect();
        out = out.add(&g.scale_cols(&cols));
    }
    Ok(out)
}

/// Manakov matrix in Kronecker normalization:
/// λ^{1/2} ϑ′(0|τ̃)/ϑ(ũ|τ̃) · Θ(z,1)⁻¹ Θ(z,λ), where ω = e^{2πiτ̃},
/// ũ = log(λ)/(2πi). The scalar turns the theta-ratio weight into the
/// elliptic Kronecker kernel in the momentum modulus.
pub fn kronecker_normalized_manakov(
    z: C64,
    lambda: C64,
    state: &PhaseState,
    params: &ModelParams,
) -> Result<ComplexMatrix> {
    let theta_one = theta_operator(z, ONE, state, params)?;
    let theta_lam = theta_operator(z, lambda, state, params)?;
    let ratio = theta_one
        .inverse_guarded(crate::linalg::CONDITION_LIMIT)?
        .matmul(&theta_lam);
    Ok(ratio.scale(kronecker_normalizer(lambda, params)?))
}

/// λ^{1/2} ϑ′(0|τ̃) / ϑ(log λ/(2πi) | τ̃).
pub fn kronecker_normalizer(lambda: C64, params: &ModelParams) -> Result<C64> {
    let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
    if params.omega == ZERO || lambda == ZERO {
        return Err(KernelError::InvalidParameter(
            "Kronecker normalization needs nonzero omega and lambda".into(),
        ));
    }
    let tau_m = params.omega.ln() / two_pi_i;
    let momentum_modulus = Modulus::new(tau_m)?;
    let u = lambda.ln() / two_pi_i;
    let d0 = crate::elliptic::jacobi_theta_d1(ZERO, &momentum_modulus, &params.control)?;
    let den = jacobi_theta(u, &momentum_modulus, &params.control)?;
    if den.norm() < DENOM_FLOOR {
        return Err(KernelError::NearSingular { magnitude: den.norm() });
    }
    let half = (lambda.ln() / 2.0).exp();
    Ok(half * d0 / den)
}

/// Classical Sklyanin-gauge Lax matrix L^Skl(z) = Ξ(z−Nη) e^{P/c} Ξ⁻¹(z).
pub fn sklyanin_lax(z: C64, state: &PhaseState, params: &ModelParams) -> Result<ComplexMatrix> {
    let n = state.len() as f64;
    let xi_shift = xi_matrix(
        XiVariant::EllipticSpectral,
        Some(z - n * params.eta),
        &state.pos,
        &params.modulus,
        &params.control,
    )?;
    let xi_here = xi_matrix(
        XiVariant::EllipticSpectral,
        Some(z),
        &state.pos,
        &params.modulus,
        &params.control,
    )?;
    let xi_inv = xi_here.inverse_guarded(CONDITION_LIMIT)?;
    Ok(xi_shift
        .scale_cols(&state.momentum_factors(params.c_light))
        .matmul(&xi_inv))
}

/// Both sides of the per-shift determinant identity behind the averaged
/// determinant representation: the LU determinant of the column-mixed
/// coefficient matrix L_ij(z, n_j η) against the elliptic-Cauchy closed form
/// (with the ϑ(−n_kη)/ϑ(q_kk − n_kη) cancellation applied analytically so
/// vanishing shifts are regular).
pub fn mixed_coupling_det_sides(
    z: C64,
    pos: &Positions,
    eta: C64,
    shifts: &[i64],
    modulus: &Modulus,
    ctl: &SeriesControl,
) -> Result<(C64, C64)> {
    let n = pos.len();
    assert_eq!(shifts.len(), n);
    let mut mixed = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let coupling = eta * shifts[j] as f64;
        for i in 0..n {
            let v = rs_lax_coeff(XiVariant::EllipticSpectral, Some(z), pos, coupling, i, j, modulus, ctl)?;
            mixed.set(i, j, v);
        }
    }
    let lhs = mixed.det();

    let q = pos.q();
    let shifted: Vec<C64> = (0..n).map(|j| q[j] + eta * shifts[j] as f64).collect();
    let total: C64 = shifts.iter().map(|&s| eta * s as f64).sum();
    let th = |w| jacobi_theta(w, modulus, ctl);
    let mut rhs = guarded_div(th(z - total)?, th(z)?)?;
    for p_idx in 0..n {
        for q_idx in (p_idx + 1)..n {
            rhs *= th(q[p_idx] - q[q_idx])?;
            rhs *= th(shifted[q_idx] - shifted[p_idx])?;
        }
    }
    for r in 0..n {
        for s in 0..n {
            if r != s {
                rhs = guarded_div(rhs, th(q[r] - shifted[s])?)?;
            }
        }
    }
    for j in 0..n {
        for k in 0..n {
            if k != j {
                rhs *= guarded_div(th(shifted[j] - q[k])?, th(q[j] - q[k])?)?;
            }
        }
    }
    Ok((lhs, rhs))
}

/// Residual of the 2×2 determinant reduction through the Fay identity:
/// Φ(z,−k₁η)Φ(z,−k₂η) − Φ(z,q₂₁−k₁η)Φ(z,q₁₂−k₂η)
///   = Φ(z,−(k₁+k₂)η)(E₁(q₁₂+k₁η) + E₁(q₂₁+k₂η) − E₁(k₁η) − E₁(k₂η)).
pub fn gl2_fay_reduction_residual(
    z: C64,
    q12: C64,
    eta: C64,
    k1: f64,
    k2: f64,
    modulus: &Modulus,
    ctl: &SeriesControl,
) -> Result<f64> {
    let phi = |a, b| kronecker_phi(a, b, modulus, ctl);
    let e1 = |a| eisenstein_e1(a, modulus, ctl);
    let lhs = phi(z, -k1 * eta)? * phi(z, -k2 * eta)?
        - phi(z, -q12 - k1 * eta)? * phi(z, q12 - k2 * eta)?;
    let bracket = e1(q12 + k1 * eta)? + e1(-q12 + k2 * eta)? - e1(k1 * eta)? - e1(k2 * eta)?;
    let rhs = phi(z, -(k1 + k2) * eta)? * bracket;
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()))
}

/// θ^{(j)}(u) = ϑ[1/2 − j/N; 1/2](u | Nτ).
pub fn theta_level(j: i64, u: C64, n: usize, modulus: &Modulus, ctl: &SeriesControl) -> Result<C64> {
    let a = 0.5 - j as f64 / n as f64;
    theta_char(a, 0.5, u, &modulus.scaled(n), ctl)
}

/// Baxter-Belavin weight
/// R_{ab,cd}(η,z) = δ_{a+c,b+d mod N} θ^{(a−c)}(z+η) / (θ^{(a−b)}(η) θ^{(b−c)}(z))
///                  · ∏_{k=1}^{N−1} θ^{(k)}(η)/θ^{(k)}(0),
/// with indices understood mod N. The normalizing product runs over the
/// characteristics whose value at 0 is nonzero.
pub fn baxter_belavin_weight(
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    eta: C64,
    z: C64,
    n: usize,
    modulus: &Modulus,
    ctl: &SeriesControl,
) -> Result<C64> {
    let nn = n as i64;
    if (a + c - b - d).rem_euclid(nn) != 0 {
        return Ok(ZERO);
    }
    let num = theta_level(a - c, z + eta, n, modulus, ctl)?;
    let den1 = theta_level(a - b, eta, n, modulus, ctl)?;
    let den2 = theta_level(b - c, z, n, modulus, ctl)?;
    let mut w = guarded_div(num, den1)?;
    w = guarded_div(w, den2)?;
    for k in 1..n as i64 {
        let zc = theta_level(k, ZERO, n, modulus, ctl)?;
        w *= guarded_div(theta_level(k, eta, n, modulus, ctl)?, zc)?;
    }
    Ok(w)
}

/// Rank-4 table of averaged R-weights ℛ_{ab,cd}(z,λ) = Σ_m (−λ)^m ω^{(m²−m)/2}
/// R_{ab,cd}(mη, z). The m = 0 term is the η → 0 limit of the weight taken by
/// Richardson extrapolation at η = 1e−8 (the closed normalization at η = 0 is
/// not available); entries with a = b, c = d inherit the simple pole of that
/// limit, so the table is intended for structural, not gated, comparisons.
#[derive(Debug, Clone)]
pub struct RWeightTable {
    pub n: usize,
    data: Vec<C64>,
}

impl RWeightTable {
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> C64 {
        let n = self.n;
        self.data[((a * n + b) * n + c) * n + d]
    }
}

pub fn averaged_r_table(
    z: C64,
    lambda: C64,
    eta: C64,
    omega: C64,
    m_cap: usize,
    n: usize,
    modulus: &Modulus,
    ctl: &SeriesControl,
) -> Result<RWeightTable> {
    let mut data = vec![ZERO; n * n * n * n];
    let eps = 1e-8;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let (ai, bi, ci, di) = (a as i64, b as i64, c as i64, d as i64);
                    let mut total = ZERO;
                    for m in -(m_cap as i64)..=m_cap as i64 {
                        let weight = if lambda == ZERO {
                            if m == 0 {
                                ONE
                            } else {
                                ZERO
                            }
                        } else {
                            int_power(-lambda, m) * omega_weight(omega, m)
                        };
                        if weight == ZERO {
                            continue;
                        }
                        let r = if m == 0 {
                            let f1 = baxter_belavin_weight(ai, bi, ci, di, C64::new(eps, 0.0), z, n, modulus, ctl)?;
                            let f2 = baxter_belavin_weight(ai, bi, ci, di, C64::new(2.0 * eps, 0.0), z, n, modulus, ctl)?;
                            2.0 * f1 - f2
                        } else {
                            baxter_belavin_weight(ai, bi, ci, di, eta * m as f64, z, n, modulus, ctl)?
                        };
                        total += weight * r;
                    }
                    data[((a * n + b) * n + c) * n + d] = total;
                }
            }
        }
    }
    Ok(RWeightTable { n, data })
}
