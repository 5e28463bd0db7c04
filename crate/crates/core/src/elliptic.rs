//! Elliptic special functions: theta series, Kronecker and Eisenstein
//! functions, the Dedekind eta product, and the determinant/trisecant
//! identities relating them.
//!
//! Conventions (nome p = e^{2πiτ}, Im τ > 0):
//!
//! - `theta_p`:      θ_p(x) = Σ_{n∈ℤ} p^{(n²−n)/2} (−x)^n
//! - `jacobi_theta`: ϑ(z|τ) = −i Σ_{k∈ℤ} (−1)^k e^{πiτ(k+1/2)²} e^{πi(2k+1)z}
//! - `theta_char`:   ϑ[a;b](z|τ) = Σ_{j∈ℤ} e^{πiτ(j+a)² + 2πi(j+a)(z+b)}
//! - `kronecker_phi`: Φ(z,u) = ϑ′(0)ϑ(z+u) / (ϑ(z)ϑ(u))
//! - `eisenstein_e1`: E₁(z) = ϑ′(z)/ϑ(z)
//!
//! The two theta families are related by
//! θ_p(e^{2πiw}) = −i p^{−1/8} e^{πiw} ϑ(w|τ); half-integer powers are always
//! built from the additive variable w, never from x, so no branch cuts enter.
//! At p = 0 the series collapse to their trigonometric limits
//! (θ_p(x) → 1 − x).

use crate::error::{KernelError, Result};
use crate::linalg::ComplexMatrix;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Ratio of |ϑ(z)| to |ϑ′(0)| below which an argument counts as sitting on
/// the zero lattice.
pub const SINGULARITY_GUARD: f64 = 1e-10;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Truncation policy for all theta series and eta products.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesControl {
    /// Hard cap on the summation index K.
    pub max_index: usize,
    /// Bound the dropped tail must satisfy: |p|^{K(K−1)/2} < tail_tolerance.
    pub tail_tolerance: f64,
    /// Minimum allowed Im τ.
    pub domain_guard: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_index: 200,
            tail_tolerance: 1e-15,
            domain_guard: 1e-6,
        }
    }
}

impl SeriesControl {
    pub fn new(max_index: usize, tail_tolerance: f64, domain_guard: f64) -> Result<Self> {
        if max_index == 0 || tail_tolerance <= 0.0 || domain_guard <= 0.0 {
            return Err(KernelError::InvalidParameter(
                "series control requires max_index ≥ 1 and positive tolerances".into(),
            ));
        }
        Ok(Self {
            max_index,
            tail_tolerance,
            domain_guard,
        })
    }

    /// Minimal K with |p|^{K(K−1)/2} < tail_tolerance, capped at `max_index`.
    pub fn truncation_index(&self, p_abs: f64) -> Result<usize> {
        if !(0.0..1.0).contains(&p_abs) {
            return Err(KernelError::Domain(format!(
                "nome modulus must satisfy |p| < 1, got {p_abs}"
            )));
        }
        for k in 1..=self.max_index {
            let exponent = (k * (k - 1) / 2) as f64;
            if p_abs.powf(exponent) < self.tail_tolerance {
                return Ok(k);
            }
        }
        Err(KernelError::Truncation(format!(
            "|p| = {p_abs} needs more than {} terms for tail {}",
            self.max_index, self.tail_tolerance
        )))
    }
}

/// Coordinate modular parameter τ together with its nome p = e^{2πiτ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus {
    tau: C64,
    p: C64,
}

impl Modulus {
    pub fn new(tau: C64) -> Result<Self> {
        Self::with_guard(tau, SeriesControl::default().domain_guard)
    }

    pub fn with_guard(tau: C64, guard: f64) -> Result<Self> {
        if !(tau.im > guard) {
            return Err(KernelError::Domain(format!(
                "Im tau = {} must exceed the guard {}",
                tau.im, guard
            )));
        }
        let p = (2.0 * PI * I * tau).exp();
        Ok(Self { tau, p })
    }

    /// Trigonometric limit: Im τ large enough that the nome underflows any
    /// O(1) arithmetic, making the p-corrections exact no-ops.
    pub fn trigonometric() -> Self {
        Self::new(C64::new(0.0, 40.0)).expect("fixed trig-limit tau is valid")
    }

    /// Modulus with τ → n·τ (used by theta characteristics on the N-fold cover).
    pub fn scaled(&self, n: usize) -> Self {
        let tau = self.tau * n as f64;
        let p = (2.0 * PI * I * tau).exp();
        Self { tau, p }
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    pub fn p(&self) -> C64 {
        self.p
    }

    fn check(&self, ctl: &SeriesControl) -> Result<()> {
        if !(self.tau.im > ctl.domain_guard) {
            return Err(KernelError::Domain(format!(
                "Im tau = {} at or below the guard {}",
                self.tau.im, ctl.domain_guard
            )));
        }
        Ok(())
    }
}

/// θ_p(x) = Σ_{n∈ℤ} p^{(n²−n)/2} (−x)^n, truncated at |n| ≤ K.
pub fn theta_p(x: C64, modulus: &Modulus, ctl: &SeriesControl) -> Result<C64> {
    if x == C64::new(0.0, 0.0) {
        return Err(KernelError::ZeroArgument("theta_p"));
    }
    modulus.check(ctl)?;
    let k_max = ctl.truncation_index(modulus.p().norm())? as i64;
    let p = modulus.p();
    let mut sum = C64::new(0.0, 0.0);
    for n in -k_max..=k_max {
        let weight = int_power(p, (n * n - n) / 2);
        sum += weight * int_power(-x, n);
    }
    Ok(sum)
}

/// ϑ(z|τ), summed over the index pairs (k, −1−k) so the truncation is
/// exactly odd in z.
pub fn jacobi_theta(z: C64, modulus: &Modulus, ctl: &SeriesControl) -> Result<C64> {
    jacobi_theta_kernel(z, modulus, ctl, false)
}

/// Term-wise derivative ϑ′(z|τ).
pub fn jacobi_theta_d1(z: C64, modulus: &Modulus, ctl: &SeriesControl) -> Result<C64> {
    jacobi_theta_kernel(z, modulus, ctl, true)
}

fn jacobi_theta_kernel(
    z: C64,
    modulus: &Modulus,
    ctl: &SeriesControl,
    derivative: bool,
) -> Result<C64> {
    modulus.check(ctl)?;
    let k_max = ctl.truncation_index(modulus.p().norm())? as i64;
    let tau = modulus.tau();
    let mut sum = C64::new(0.0, 0.0);
    for k in -(k_max + 1)..=k_max {
        let half = k as f64 + 0.5;
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let gauss = (PI * I * tau * half * half).exp();
        let phase = (PI * I * (2 * k + 1) as f64 * z).exp();
        let mut term = sign * gauss * phase;
        if derivative {
            term *= PI * I * (2 * k + 1) as f64;
        }
        sum += term;
    }
    Ok(-I * sum)
}

/// Riemann theta with characteristics a, b:
/// ϑ[a;b](z|τ) = Σ_j exp(πiτ(j+a)² + 2πi(j+a)(z+b)).
pub fn theta_char(a: f64, b: f64, z: C64, modulus: &Modulus, ctl: &SeriesControl) -> Result<C64> {
    modulus.check(ctl)?;
    let k_max = ctl.truncation_index(modulus.p().norm())? as i64 + 2;
    let tau = modulus.tau();
    let mut sum = C64::new(0.0, 0.0);
    for j in -k_max..=k_max {
        let m = j as f64 + a;
        sum += (PI * I * tau * m * m + 2.0 * PI * I * m * (z + b)).exp();
    }
    Ok(sum)
}

/// Residual of the bridge between the two theta families at w
/// (x = e^{2πiw}, x^{1/2} := e^{πiw}):
/// θ_p(x) = −i p^{−1/8} x^{1/2} ϑ(w|τ).
pub fn theta_relation_residual(w: C64, modulus: &Modulus, ctl: &SeriesControl) -> Result<f64> {
    let x = (2.0 * PI * I * w).exp();
    let lhs = theta_p(x, modulus, ctl)?;
    let p_eighth = (-PI * I * modulus.tau() / 4.0).exp(); // p^{−1/8} from τ, branch-free
    let rhs = -I * p_eighth * (PI * I * w).exp() * jacobi_theta(w, modulus, ctl)?;
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()))
}

/// ϑ evaluated with the singularity guard: fails if |ϑ(z)| < guard·|ϑ′(0)|.
fn jacobi_theta_guarded(z: C64, modulus: &Modulus, ctl: &SeriesControl) -> Result<C64> {
    let v = jacobi_theta(z, modulus, ctl)?;
    let scale = jacobi_theta_d1(C64::new(0.0, 0.0), modulus, ctl)?.norm();
    if v.norm() < SINGULARITY_GUARD * scale {
        return Err(KernelError::NearSingular { magnitude: v.norm() });
    }
    Ok(v)
}

/// Kronecker function Φ(z,u) = ϑ′(0)ϑ(z+u)/(ϑ(z)ϑ(u)).
pub fn kronecker_phi(z: C64, u: C64, modulus: &Modulus, ctl: &SeriesControl) -> Result<C64> {
    let d0 = jacobi_theta_d1(C64::new(0.0, 0.0), modulus, ctl)?;
    let num = jacobi_theta(z + u, modulus, ctl)?;
    let dz = jacobi_theta_guarded(z, modulus, ctl)?;
    let du = jacobi_theta_guarded(u, modulus, ctl)?;
    Ok(d0 * num / (dz * du))
}

/// First Eisenstein function E₁(z) = ϑ′(z)/ϑ(z).
pub fn eisenstein_e1(z: C64, modulus: &Modulus, ctl: &SeriesControl) -> Result<C64> {
    let den = jacobi_theta_guarded(z, modulus, ctl)?;
    Ok(jacobi_theta_d1(z, modulus, ctl)? / den)
}

/// Dedekind eta η_D(τ) = e^{πiτ/12} ∏_{k≥1} (1 − p^k), truncated once the
/// factors are within tail tolerance of 1.
pub fn dedekind_eta(modulus: &Modulus, ctl: &SeriesControl) -> Result<C64> {
    modulus.check(ctl)?;
    let p = modulus.p();
    let p_abs = p.norm();
    if p_abs >= 1.0 {
        return Err(KernelError::Domain("|p| must be < 1".into()));
    }
    let mut product = ONE;
    let mut p_pow = ONE;
    let mut converged = false;
    for _ in 1..=ctl.max_index {
        p_pow *= p;
        product *= ONE - p_pow;
        if p_pow.norm() < ctl.tail_tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(KernelError::Truncation(format!(
            "eta product needs more than {} factors for |p| = {p_abs}",
            ctl.max_index
        )));
    }
    Ok((PI * I * modulus.tau() / 12.0).exp() * product)
}

/// c_N(τ) = (−1)^{N−1} / (i η_D(τ))^{(N−1)(N−2)/2}.
pub fn cn_constant(n: usize, modulus: &Modulus, ctl: &SeriesControl) -> Result<C64> {
    assert!(n >= 1);
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let exponent = (n as i64 - 1) * (n as i64 - 2) / 2;
    let base = I * dedekind_eta(modulus, ctl)?;
    Ok(sign / int_power(base, exponent))
}

/// Both sides of the elliptic Cauchy determinant identity at (z, u, w):
/// LU determinant of [ϑ(z+u_i−w_j)/(ϑ(z)ϑ(u_i−w_j))] versus the closed
/// product form. Returns (determinant, closed_form).
pub fn cauchy_determinant_sides(
    z: C64,
    u: &[C64],
    w: &[C64],
    modulus: &Modulus,
    ctl: &SeriesControl,
) -> Result<(C64, C64)> {
    assert_eq!(u.len(), w.len());
    let n = u.len();
    let theta_z = jacobi_theta_guarded(z, modulus, ctl)?;
    let mut matrix = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let den = jacobi_theta_guarded(u[i] - w[j], modulus, ctl)?;
            let num = jacobi_theta(z + u[i] - w[j], modulus, ctl)?;
            matrix.set(i, j, num / (theta_z * den));
        }
    }
    let lhs = matrix.det();

    let total: C64 = u.iter().zip(w).map(|(a, b)| a - b).sum();
    let mut rhs = jacobi_theta(z + total, modulus, ctl)? / theta_z;
    for p_idx in 0..n {
        for q_idx in (p_idx + 1)..n {
            rhs *= jacobi_theta(u[p_idx] - u[q_idx], modulus, ctl)?;
            rhs *= jacobi_theta(w[q_idx] - w[p_idx], modulus, ctl)?;
        }
    }
    for r in 0..n {
        for s in 0..n {
            rhs /= jacobi_theta_guarded(u[r] - w[s], modulus, ctl)?;
        }
    }
    Ok((lhs, rhs))
}

/// Relative residual of the Cauchy determinant identity.
pub fn cauchy_determinant_residual(
    z: C64,
    u: &[C64],
    w: &[C64],
    modulus: &Modulus,
    ctl: &SeriesControl,
) -> Result<f64> {
    let (lhs, rhs) = cauchy_determinant_sides(z, u, w, modulus, ctl)?;
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()))
}

/// Residuals of the Fay trisecant identity, its Eisenstein degeneration and
/// the closed form of the Eisenstein bracket, evaluated at (z, w, u₁, u₂).
pub fn fay_residuals(
    z: C64,
    w: C64,
    u1: C64,
    u2: C64,
    modulus: &Modulus,
    ctl: &SeriesControl,
) -> Result<(f64, f64, f64)> {
    let phi = |a, b| kronecker_phi(a, b, modulus, ctl);
    let e1 = |a| eisenstein_e1(a, modulus, ctl);

    // trisecant
    let lhs_tri = phi(z, u1)? * phi(w, u2)?;
    let rhs_tri = phi(z, u1 - u2)? * phi(z + w, u2)? + phi(w, u2 - u1)? * phi(z + w, u1)?;
    let r_tri = (lhs_tri - rhs_tri).norm() / lhs_tri.norm().max(rhs_tri.norm());

    // degeneration at u1 = u2 = u
    let bracket = e1(z)? + e1(w)? + e1(u1)? - e1(z + w + u1)?;
    let lhs_deg = phi(z, u1)? * phi(w, u1)?;
    let rhs_deg = phi(z + w, u1)? * bracket;
    let r_deg = (lhs_deg - rhs_deg).norm() / lhs_deg.norm().max(rhs_deg.norm());

    // closed form of the bracket
    let d0 = jacobi_theta_d1(C64::new(0.0, 0.0), modulus, ctl)?;
    let num = d0
        * jacobi_theta(z + w, modulus, ctl)?
        * jacobi_theta(z + u1, modulus, ctl)?
        * jacobi_theta(w + u1, modulus, ctl)?;
    let den = jacobi_theta_guarded(z, modulus, ctl)?
        * jacobi_theta_guarded(w, modulus, ctl)?
        * jacobi_theta_guarded(u1, modulus, ctl)?
        * jacobi_theta_guarded(z + w + u1, modulus, ctl)?;
    let rhs_closed = num / den;
    let r_closed = (bracket - rhs_closed).norm() / bracket.norm().max(rhs_closed.norm());

    Ok((r_tri, r_deg, r_closed))
}

/// Integer power that treats exponent 0 as exactly one (0⁰ = 1), so zero
/// bases collapse series to their finite limits without NaNs.
pub fn int_power(base: C64, exponent: i64) -> C64 {
    if exponent == 0 {
        return ONE;
    }
    let mag = exponent.unsigned_abs().min(i32::MAX as u64) as i32;
    let pos = base.powi(mag);
    if exponent > 0 {
        pos
    } else {
        ONE / pos
    }
}
