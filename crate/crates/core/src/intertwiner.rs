//! Intertwining (Stäckel) matrices Ξ of the IRF-Vertex correspondence, their
//! closed-form determinants, the diagonal normalizer D, and the normalized
//! matrix g = Ξ D⁻¹.
//!
//! Five families are implemented, one per coordinate flavour:
//!
//! - rational, no spectral parameter:      Ξ_ij = (−q_j)^{i−1}
//! - trigonometric, no spectral parameter: Ξ_ij = x_j^{N−i}, x_j = e^{q_j}
//! - rational, spectral:     Ξ_ij = (z/N − q_j)^{ϱ(i)}, ϱ = (0,…,N−2,N)
//! - trigonometric, spectral: Ξ_ij = y_j^{i−1} + δ_{iN}(−1)^N / y_j,
//!   y_j = e^{−2q̄_j + 2z/N}
//! - elliptic, spectral:      Ξ_ij = ϑ[1/2 − i/N; N/2](z − N q̄_j | Nτ)
//!
//! Every determinant is a (theta-generalized) Vandermonde; the spectral
//! variants acquire a simple zero at z = 0 in the center-of-mass frame.

use crate::elliptic::{cn_constant, jacobi_theta, theta_char, Modulus, SeriesControl};
use crate::error::{KernelError, Result};
use crate::linalg::ComplexMatrix;
use num_complex::Complex64 as C64;

const ONE: C64 = C64::new(1.0, 0.0);

/// Default floor on pairwise coordinate separation.
pub const SEPARATION_FLOOR: f64 = 1e-8;

/// Particle coordinates with the center-of-mass data derived once.
#[derive(Debug, Clone, PartialEq)]
pub struct Positions {
    q: Vec<C64>,
    q0: C64,
    qbar: Vec<C64>,
}

impl Positions {
    pub fn new(q: Vec<C64>) -> Result<Self> {
        Self::with_floor(q, SEPARATION_FLOOR)
    }

    pub fn with_floor(q: Vec<C64>, floor: f64) -> Result<Self> {
        if q.is_empty() {
            return Err(KernelError::InvalidParameter(
                "at least one coordinate required".into(),
            ));
        }
        for i in 0..q.len() {
            for j in 0..i {
                let sep = (q[i] - q[j]).norm();
                if sep < floor {
                    return Err(KernelError::InvalidParameter(format!(
                        "coordinates {j} and {i} are only {sep:.3e} apart (floor {floor:.3e})"
                    )));
                }
            }
        }
        let n = q.len() as f64;
        let q0 = q.iter().sum::<C64>() / n;
        let qbar = q.iter().map(|&v| v - q0).collect();
        Ok(Self { q, q0, qbar })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn q(&self) -> &[C64] {
        &self.q
    }

    pub fn q0(&self) -> C64 {
        self.q0
    }

    pub fn qbar(&self) -> &[C64] {
        &self.qbar
    }

    /// x_j = e^{q_j} (trigonometric multiplicative coordinates).
    pub fn x_trig(&self) -> Vec<C64> {
        self.q.iter().map(|&v| v.exp()).collect()
    }

    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.q.len() {
            for j in 0..i {
                best = best.min((self.q[i] - self.q[j]).norm());
            }
        }
        best
    }
}

/// The five intertwining-matrix families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiVariant {
    RationalNoSpectral,
    TrigNoSpectral,
    RationalSpectral,
    TrigSpectral,
    EllipticSpectral,
}

impl XiVariant {
    pub fn needs_spectral(&self) -> bool {
        matches!(
            self,
            XiVariant::RationalSpectral | XiVariant::TrigSpectral | XiVariant::EllipticSpectral
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            XiVariant::RationalNoSpectral => "rational",
            XiVariant::TrigNoSpectral => "trigonometric",
            XiVariant::RationalSpectral => "rational-spectral",
            XiVariant::TrigSpectral => "trigonometric-spectral",
            XiVariant::EllipticSpectral => "elliptic-spectral",
        }
    }

    fn unwrap_spectral(&self, z: Option<C64>) -> Result<C64> {
        match (self.needs_spectral(), z) {
            (true, Some(z)) => Ok(z),
            (true, None) => Err(KernelError::VariantMismatch {
                variant: self.name(),
                reason: "spectral parameter required",
            }),
            (false, Some(_)) => Err(KernelError::VariantMismatch {
                variant: self.name(),
                reason: "spectral parameter not accepted",
            }),
            (false, None) => Ok(C64::new(0.0, 0.0)),
        }
    }
}

/// Exponent profile ϱ(i) of the rational spectral family (1-based i).
fn rho(i: usize, n: usize) -> i64 {
    if i < n {
        (i - 1) as i64
    } else {
        n as i64
    }
}

fn int_pow(base: C64, e: i64) -> C64 {
    crate::elliptic::int_power(base, e)
}

/// Elliptic Stäckel matrix on raw column arguments: entry (i,j) is
/// ϑ[1/2 − i/N; N/2](z − N·coord_j | Nτ). No center-of-mass shift is applied.
pub fn xi_elliptic_raw(
    z: C64,
    coords: &[C64],
    modulus: &Modulus,
    ctl: &SeriesControl,
) -> Result<ComplexMatrix> {
    let n = coords.len();
    let scaled = modulus.scaled(n);
    let b = n as f64 / 2.0;
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 1..=n {
        let a = 0.5 - i as f64 / n as f64;
        for j in 0..n {
            let arg = z - n as f64 * coords[j];
            m.set(i - 1, j, theta_char(a, b, arg, &scaled, ctl)?);
        }
    }
    Ok(m)
}

/// The intertwining matrix for the requested variant.
///
/// Spectral variants require `z`; non-spectral ones reject it. The elliptic
/// family evaluates at the center-of-mass coordinates q̄, the rational
/// spectral family at the coordinates exactly as given.
pub fn xi_matrix(
    variant: XiVariant,
    z: Option<C64>,
    pos: &Positions,
    modulus: &Modulus,
    ctl: &SeriesControl,
) -> Result<ComplexMatrix> {
    let n = pos.len();
    let zv = variant.unwrap_spectral(z)?;
    match variant {
        XiVariant::RationalNoSpectral => Ok(ComplexMatrix::from_fn(n, n, |i, j| {
            int_pow(-pos.q()[j], i as i64)
        })),
        XiVariant::TrigNoSpectral => {
            let x = pos.x_trig();
            Ok(ComplexMatrix::from_fn(n, n, |i, j| {
                int_pow(x[j], (n - 1 - i) as i64)
            }))
        }
        XiVariant::RationalSpectral => Ok(ComplexMatrix::from_fn(n, n, |i, j| {
            int_pow(zv / n as f64 - pos.q()[j], rho(i + 1, n))
        })),
        XiVariant::TrigSpectral => {
            let y = trig_spectral_coords(zv, pos);
            let corner = if n.is_multiple_of(2) { ONE } else { -ONE };
            Ok(ComplexMatrix::from_fn(n, n, |i, j| {
                let mut v = int_pow(y[j], i as i64);
                if i == n - 1 {
                    v += corner / y[j];
                }
                v
            }))
        }
        XiVariant::EllipticSpectral => xi_elliptic_raw(zv, pos.qbar(), modulus, ctl),
    }
}

/// y_j = e^{−2q̄_j + 2z/N} of the trigonometric spectral family.
pub fn trig_spectral_coords(z: C64, pos: &Positions) -> Vec<C64> {
    let n = pos.len() as f64;
    pos.qbar()
        .iter()
        .map(|&qb| (-2.0 * qb + 2.0 * z / n).exp())
        .collect()
}

/// Closed-form determinant of `xi_matrix` for the same variant/arguments.
pub fn xi_det_closed(
    variant: XiVariant,
    z: Option<C64>,
    pos: &Positions,
    modulus: &Modulus,
    ctl: &SeriesControl,
) -> Result<C64> {
    let n = pos.len();
    let zv = variant.unwrap_spectral(z)?;
    match variant {
        XiVariant::RationalNoSpectral => Ok(pair_product(pos.q(), |a, b| a - b)),
        XiVariant::TrigNoSpectral => Ok(pair_product(&pos.x_trig(), |a, b| a - b)),
        XiVariant::RationalSpectral => {
            let total: C64 = pos.q().iter().sum();
            Ok((zv - total) * pair_product(pos.q(), |a, b| a - b))
        }
        XiVariant::TrigSpectral => {
            let sinh_like = pair_product(pos.q(), |a, b| (a - b).exp() - (b - a).exp());
            Ok(((n as f64 - 2.0) * zv).exp() * (zv.exp() - (-zv).exp()) * sinh_like)
        }
        XiVariant::EllipticSpectral => {
            // The characteristic b = N/2 contributes e^{2πi·Σ_i a_i} = −1 per
            // unit of b relative to the reduced representative, so the theta
            // Vandermonde carries an overall −1 against c_N ϑ(z) ∏ ϑ(q_i−q_j);
            // verified numerically for N = 1..5.
            let mut det = -cn_constant(n, modulus, ctl)? * jacobi_theta(zv, modulus, ctl)?;
            for i in 0..n {
                for j in (i + 1)..n {
                    det *= jacobi_theta(pos.q()[i] - pos.q()[j], modulus, ctl)?;
                }
            }
            Ok(det)
        }
    }
}

fn pair_product(v: &[C64], f: impl Fn(C64, C64) -> C64) -> C64 {
    let mut prod = ONE;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            prod *= f(v[i], v[j]);
        }
    }
    prod
}

/// Diagonal normalizer D_jj = ∏_{k≠j} ϑ(q_j − q_k | τ).
pub fn d_matrix(pos: &Positions, modulus: &Modulus, ctl: &SeriesControl) -> Result<ComplexMatrix> {
    let n = pos.len();
    let mut diag = vec![ONE; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                diag[j] *= jacobi_theta(pos.q()[j] - pos.q()[k], modulus, ctl)?;
            }
        }
        if diag[j].norm() < 1e-280 {
            return Err(KernelError::NearSingular {
                magnitude: diag[j].norm(),
            });
        }
    }
    Ok(ComplexMatrix::diagonal(&diag))
}

/// Normalized intertwiner g(z) = Ξ(z) D⁻¹ (elliptic spectral family).
pub fn g_matrix(
    z: C64,
    pos: &Positions,
    modulus: &Modulus,
    ctl: &SeriesControl,
) -> Result<ComplexMatrix> {
    let xi = xi_matrix(XiVariant::EllipticSpectral, Some(z), pos, modulus, ctl)?;
    let d = d_matrix(pos, modulus, ctl)?;
    let inv_diag: Vec<C64> = (0..pos.len()).map(|j| ONE / d.get(j, j)).collect();
    Ok(xi.scale_cols(&inv_diag))
}
