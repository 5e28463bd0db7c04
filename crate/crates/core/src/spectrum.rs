//! The p = 0 spectrum: monomial and Schur bases of symmetric polynomials,
//! the matrix of the generating operator on a homogeneous degree block,
//! upper triangularity in dominance order, and the eigenvalue products
//! E(u)_λ = ∏_i θ_ω(u t^{N−i} q^{λ_i}).
//!
//! Everything here works in the coordinate trigonometric limit, where the
//! generating operator acts on symmetric polynomials through exact shift
//! substitutions x_j → q^{n_j} x_j; matrices are recovered by evaluating the
//! action at seeded sample points and solving the (guarded) linear system in
//! the monomial basis.

use crate::elliptic::int_power;
use crate::error::{KernelError, Result};
use crate::linalg::ComplexMatrix;
use crate::quantumops::{shift_box_by_weight, shift_degree, shift_weight};
use crate::sampling::SplitMix64;
use num_complex::Complex64 as C64;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// Young diagram: weakly decreasing nonnegative parts, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(KernelError::InvalidParameter(format!(
                "parts must be weakly decreasing, got {parts:?}"
            )));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self { parts: vec![] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Part i (0-based), zero beyond the length.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn padded(&self, n: usize) -> Vec<usize> {
        (0..n).map(|i| self.part(i)).collect()
    }

    /// All partitions of weight d with at most `max_len` parts, in ascending
    /// lexicographic order (which refines the dominance order upward).
    pub fn all_of_weight(d: usize, max_len: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        gather_partitions(d, d, max_len, &mut current, &mut out);
        out.reverse();
        out
    }
}

fn gather_partitions(
    remaining: usize,
    max_part: usize,
    slots: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Partition>,
) {
    if remaining == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    if slots == 0 {
        return;
    }
    let top = remaining.min(max_part);
    for first in (1..=top).rev() {
        current.push(first);
        gather_partitions(remaining - first, first, slots - 1, current, out);
        current.pop();
    }
}

/// Dominance comparison of two partitions of equal weight:
/// `Less` when every partial sum of `a` is ≤ the one of `b`.
pub fn dominance_cmp(a: &Partition, b: &Partition) -> Option<Ordering> {
    if a.weight() != b.weight() {
        return None;
    }
    let n = a.len().max(b.len());
    let mut sum_a = 0usize;
    let mut sum_b = 0usize;
    let mut le = true;
    let mut ge = true;
    for i in 0..n {
        sum_a += a.part(i);
        sum_b += b.part(i);
        if sum_a > sum_b {
            le = false;
        }
        if sum_a < sum_b {
            ge = false;
        }
    }
    match (le, ge) {
        (true, true) => Some(Ordering::Equal),
        (true, false) => Some(Ordering::Less),
        (false, true) => Some(Ordering::Greater),
        (false, false) => None,
    }
}

/// Monomial symmetric polynomial m_λ(x): the sum over the distinct
/// permutations of the padded part vector.
pub fn monomial_sym(lambda: &Partition, x: &[C64]) -> C64 {
    let n = x.len();
    if lambda.len() > n {
        return ZERO;
    }
    let padded = lambda.padded(n);
    let mut seen = BTreeSet::new();
    let mut total = ZERO;
    let mut scratch = padded;
    scratch.sort_unstable();
    loop {
        if seen.insert(scratch.clone()) {
            let mut term = ONE;
            for (xi, &e) in x.iter().zip(&scratch) {
                term *= int_power(*xi, e as i64);
            }
            total += term;
        }
        if !next_permutation(&mut scratch) {
            break;
        }
    }
    total
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Schur polynomial via the bialternant: det(x_i^{λ_j + N−1−j}) / Δ(x).
pub fn schur(lambda: &Partition, x: &[C64]) -> Result<C64> {
    let n = x.len();
    if lambda.len() > n {
        return Ok(ZERO);
    }
    let padded = lambda.padded(n);
    let numerator = ComplexMatrix::from_fn(n, n, |i, j| {
        int_power(x[i], padded[j] as i64 + (n - 1 - j) as i64)
    });
    let vandermonde = ComplexMatrix::from_fn(n, n, |i, j| int_power(x[i], (n - 1 - j) as i64));
    let den = vandermonde.det();
    if den.norm() < 1e-200 {
        return Err(KernelError::NearSingular {
            magnitude: den.norm(),
        });
    }
    Ok(numerator.det() / den)
}

/// Power series in ω truncated at a fixed order (inclusive).
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSeries {
    coeffs: Vec<C64>,
}

impl OmegaSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![ZERO; order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = ONE;
        s
    }

    pub fn from_coeffs(coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::from_coeffs((0..=order).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::from_coeffs((0..=order).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = vec![ZERO; order + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(order + 1) {
            for (j, &b) in other.coeffs.iter().enumerate() {
                if i + j > order {
                    break;
                }
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    /// Series division; the divisor needs an invertible leading coefficient.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let lead = other.coeff(0);
        if lead.norm() < 1e-14 {
            return Err(KernelError::SeriesInversion(format!(
                "leading coefficient {lead} is not invertible"
            )));
        }
        let order = self.order().min(other.order());
        let mut out = vec![ZERO; order + 1];
        for k in 0..=order {
            let mut acc = self.coeff(k);
            for j in 0..k {
                acc -= out[j] * other.coeff(k - j);
            }
            out[k] = acc / lead;
        }
        Ok(Self::from_coeffs(out))
    }

    pub fn eval(&self, omega: C64) -> C64 {
        let mut acc = ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * omega + c;
        }
        acc
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// θ_ω(x) as a truncated ω-series: Σ_{n : (n²−n)/2 ≤ order} ω^{(n²−n)/2}(−x)^n.
pub fn theta_omega_series(x: C64, order: usize) -> OmegaSeries {
    let mut coeffs = vec![ZERO; order + 1];
    let mut n = -(order as i64) - 2;
    while n <= order as i64 + 2 {
        let w = (n * n - n) / 2;
        if w >= 0 && (w as usize) <= order {
            coeffs[w as usize] += int_power(-x, n);
        }
        n += 1;
    }
    OmegaSeries::from_coeffs(coeffs)
}

/// Eigenvalue product E(u)_λ = ∏_{i=1}^N θ_ω(u t^{N−i} q^{λ_i}) as an
/// ω-series truncated consistently at total order `order`.
pub fn eigenvalue_product(
    u: C64,
    lambda: &Partition,
    n: usize,
    t: C64,
    q: C64,
    order: usize,
) -> OmegaSeries {
    let mut acc = OmegaSeries::one(order);
    for i in 0..n {
        let a = u * int_power(t, (n - 1 - i) as i64) * int_power(q, lambda.part(i) as i64);
        acc = acc.mul(&theta_omega_series(a, order));
    }
    acc
}

/// u-expansion coefficients E_{k,λ} of the eigenvalue product, each an
/// ω-series: E(u)_λ = Σ_k u^k E_{k,λ}.
pub fn eigenvalue_u_coefficients(
    lambda: &Partition,
    n: usize,
    t: C64,
    q: C64,
    order: usize,
) -> BTreeMap<i64, OmegaSeries> {
    // convolve the per-particle series, tracking (u-degree, ω-power)
    let mut table: BTreeMap<(i64, usize), C64> = BTreeMap::new();
    table.insert((0, 0), ONE);
    for i in 0..n {
        let a = int_power(t, (n - 1 - i) as i64) * int_power(q, lambda.part(i) as i64);
        let mut next: BTreeMap<(i64, usize), C64> = BTreeMap::new();
        let mut m = -(order as i64) - 2;
        while m <= order as i64 + 2 {
            let w = (m * m - m) / 2;
            if w >= 0 && (w as usize) <= order {
                let factor = int_power(-a, m);
                for (&(k, pw), &v) in &table {
                    let nw = pw + w as usize;
                    if nw <= order {
                        *next.entry((k + m, nw)).or_insert(ZERO) += v * factor;
                    }
                }
            }
            m += 1;
        }
        table = next;
    }
    let mut out: BTreeMap<i64, OmegaSeries> = BTreeMap::new();
    for (&(k, pw), &v) in &table {
        out.entry(k)
            .or_insert_with(|| OmegaSeries::zero(order))
            .coeffs[pw] += v;
    }
    out
}

/// Eigenvalue of the first Hamiltonian as an ω-series:
/// ℰ_{1,λ} = E_{1,λ} / E_{0,λ}.
pub fn h1_eigenvalue_series(
    lambda: &Partition,
    n: usize,
    t: C64,
    q: C64,
    order: usize,
) -> Result<OmegaSeries> {
    let coeffs = eigenvalue_u_coefficients(lambda, n, t, q, order);
    let e0 = coeffs
        .get(&0)
        .cloned()
        .unwrap_or_else(|| OmegaSeries::zero(order));
    let e1 = coeffs
        .get(&1)
        .cloned()
        .unwrap_or_else(|| OmegaSeries::zero(order));
    e1.div(&e0)
}

/// Apply the trigonometric generating operator pointwise:
/// Σ_n ω^{w(n)} (−u)^{Σn} ∏_{i<j} (t^{n_i}x_i − t^{n_j}x_j)/(x_i − x_j) · f(q^n ∘ x),
/// restricted to shifts with ω-weight ≤ order and, optionally, fixed Σn.
fn apply_operator(
    x: &[C64],
    f: &dyn Fn(&[C64]) -> C64,
    u: Option<C64>,
    fixed_degree: Option<i64>,
    fixed_weight: Option<i64>,
    omega: Option<C64>,
    t: C64,
    q: C64,
    order: usize,
) -> C64 {
    let n = x.len();
    let mut acc = ZERO;
    for shift in shift_box_by_weight(n, order as i64) {
        if let Some(k) = fixed_degree {
            if shift_degree(&shift) != k {
                continue;
            }
        }
        if let Some(w) = fixed_weight {
            if shift_weight(&shift) != w {
                continue;
            }
        }
        let mut term = ONE;
        if let Some(om) = omega {
            term *= int_power(om, shift_weight(&shift));
            if term == ZERO {
                continue;
            }
        }
        if let Some(uv) = u {
            term *= int_power(-uv, shift_degree(&shift));
        } else {
            // component extraction: carry the sign of (−u)^{Σn} only
            if shift_degree(&shift) % 2 != 0 {
                term = -term;
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                term *= (int_power(t, shift[i]) * x[i] - int_power(t, shift[j]) * x[j])
                    / (x[i] - x[j]);
            }
        }
        let shifted: Vec<C64> = x
            .iter()
            .zip(&shift)
            .map(|(&xi, &s)| int_power(q, s) * xi)
            .collect();
        acc += term * f(&shifted);
    }
    acc
}

/// Condition ceiling for the monomial-basis fit.
const FIT_CONDITION_LIMIT: f64 = 1e10;
const FIT_ATTEMPTS: usize = 40;

struct FitFrame {
    basis: Vec<Partition>,
    points: Vec<Vec<C64>>,
    lu: crate::linalg::LuFactors,
}

fn build_fit_frame(n_vars: usize, degree: usize, seed: u64) -> Result<FitFrame> {
    let basis = Partition::all_of_weight(degree, n_vars);
    let dim = basis.len();
    let mut rng = SplitMix64::new(seed);
    for _ in 0..FIT_ATTEMPTS {
        let points: Vec<Vec<C64>> = (0..dim)
            .map(|_| {
                let mut pts;
                loop {
                    pts = (0..n_vars)
                        .map(|_| rng.complex_annulus(0.55, 1.45))
                        .collect::<Vec<C64>>();
                    let ok = (0..n_vars)
                        .all(|i| (0..i).all(|j| (pts[i] - pts[j]).norm() > 0.15));
                    if ok {
                        break;
                    }
                }
                pts
            })
            .collect();
        let vmat = ComplexMatrix::from_fn(dim, dim, |s, m| monomial_sym(&basis[m], &points[s]));
        if vmat.condition_estimate() > FIT_CONDITION_LIMIT {
            continue;
        }
        let lu = vmat.lu();
        return Ok(FitFrame { basis, points, lu });
    }
    Err(KernelError::IllConditioned {
        cond: FIT_CONDITION_LIMIT,
    })
}

impl FitFrame {
    /// Fit one operator image in the monomial basis: column of coefficients.
    fn fit(&self, action: impl Fn(&[C64]) -> C64) -> Result<Vec<C64>> {
        let rhs: Vec<C64> = self.points.iter().map(|p| action(p)).collect();
        self.lu.solve(&rhs)
    }
}

/// Matrix of the generating operator Ô^{trig}(u) on the degree-d block of
/// symmetric polynomials in the monomial basis (basis returned alongside,
/// ascending in a total order refining dominance). Entries A_{μλ} satisfy
/// Ô m_λ = Σ_μ A_{μλ} m_μ.
pub fn operator_matrix(
    u: C64,
    t: C64,
    q: C64,
    omega: C64,
    n_vars: usize,
    degree: usize,
    omega_order: usize,
    seed: u64,
) -> Result<(Vec<Partition>, ComplexMatrix)> {
    let frame = build_fit_frame(n_vars, degree, seed)?;
    let dim = frame.basis.len();
    let mut matrix = ComplexMatrix::zeros(dim, dim);
    for (col, lambda) in frame.basis.iter().enumerate() {
        let column = frame.fit(|pt| {
            apply_operator(
                pt,
                &|y| monomial_sym(lambda, y),
                Some(u),
                None,
                None,
                Some(omega),
                t,
                q,
                omega_order,
            )
        })?;
        for (row, v) in column.into_iter().enumerate() {
            matrix.set(row, col, v);
        }
    }
    Ok((frame.basis, matrix))
}

/// Matrices of the λ-expansion components Ô_k on the degree-d block, split
/// by ω-power: `result[k_idx][m]` is the coefficient matrix of ω^m in Ô_{k}.
pub fn operator_component_matrices(
    t: C64,
    q: C64,
    n_vars: usize,
    degree: usize,
    lambda_degrees: &[i64],
    omega_order: usize,
    seed: u64,
) -> Result<(Vec<Partition>, Vec<Vec<ComplexMatrix>>)> {
    let frame = build_fit_frame(n_vars, degree, seed)?;
    let dim = frame.basis.len();
    let mut all = Vec::with_capacity(lambda_degrees.len());
    for &k in lambda_degrees {
        let mut per_weight = Vec::with_capacity(omega_order + 1);
        for m in 0..=omega_order as i64 {
            let mut matrix = ComplexMatrix::zeros(dim, dim);
            for (col, lambda) in frame.basis.iter().enumerate() {
                let column = frame.fit(|pt| {
                    apply_operator(
                        pt,
                        &|y| monomial_sym(lambda, y),
                        None,
                        Some(k),
                        Some(m),
                        None,
                        t,
                        q,
                        omega_order,
                    )
                })?;
                for (row, v) in column.into_iter().enumerate() {
                    matrix.set(row, col, v);
                }
            }
            per_weight.push(matrix);
        }
        all.push(per_weight);
    }
    Ok((frame.basis, all))
}

/// Evaluate the operator action on m_λ at a fresh point (used to confirm the
/// fitted matrix reproduces the action away from the fitting points).
pub fn operator_action_at(
    point: &[C64],
    lambda: &Partition,
    u: C64,
    t: C64,
    q: C64,
    omega: C64,
    omega_order: usize,
) -> C64 {
    apply_operator(
        point,
        &|y| monomial_sym(lambda, y),
        Some(u),
        None,
        None,
        Some(omega),
        t,
        q,
        omega_order,
    )
}

/// Matrix-valued ω-series H = A₀⁻¹ A_k and the commutator residual
/// ‖[H₁, H₂]‖ / (‖H₁‖·‖H₂‖), maximized over ω-powers ≤ omega_order.
pub fn commutator_residual(
    t: C64,
    q: C64,
    n_vars: usize,
    degree: usize,
    omega_order: usize,
    seed: u64,
) -> Result<f64> {
    let (_, mats) = operator_component_matrices(t, q, n_vars, degree, &[0, 1, 2], omega_order, seed)?;
    let a0 = &mats[0];
    let dim = a0[0].rows();
    // series inverse of A₀ = I + Σ_{m≥1} ω^m B_m
    let identity = ComplexMatrix::identity(dim);
    if a0[0].rel_distance(&identity) > 1e-10 {
        return Err(KernelError::SeriesInversion(
            "leading block of the zero-degree component is not the identity".into(),
        ));
    }
    let mut inv: Vec<ComplexMatrix> = vec![identity.clone()];
    for m in 1..=omega_order {
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for j in 1..=m {
            acc = acc.add(&a0[j].matmul(&inv[m - j]));
        }
        inv.push(acc.scale(C64::new(-1.0, 0.0)));
    }
    let series_mul = |a: &[ComplexMatrix], b: &[ComplexMatrix]| -> Vec<ComplexMatrix> {
        (0..=omega_order)
            .map(|m| {
                let mut acc = ComplexMatrix::zeros(dim, dim);
                for j in 0..=m {
                    acc = acc.add(&a[j].matmul(&b[m - j]));
                }
                acc
            })
            .collect()
    };
    let h1 = series_mul(&inv, &mats[1]);
    let h2 = series_mul(&inv, &mats[2]);
    let comm_a = series_mul(&h1, &h2);
    let comm_b = series_mul(&h2, &h1);
    let scale_1 = h1.iter().map(|m| m.frobenius_norm()).fold(0.0, f64::max);
    let scale_2 = h2.iter().map(|m| m.frobenius_norm()).fold(0.0, f64::max);
    let scale = (scale_1 * scale_2).max(1e-30);
    let mut worst = 0.0f64;
    for m in 0..=omega_order {
        worst = worst.max(comm_a[m].sub(&comm_b[m]).frobenius_norm() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn part(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn partition_enumeration_and_order() {
        let all = Partition::all_of_weight(4, 3);
        let expected: Vec<Partition> = vec![
            part(&[2, 1, 1]),
            part(&[2, 2]),
            part(&[3, 1]),
            part(&[4]),
        ];
        assert_eq!(all, expected);
        // ascending order refines dominance
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                assert_ne!(dominance_cmp(a, b), Some(Ordering::Greater));
            }
        }
        assert_eq!(dominance_cmp(&part(&[2, 2]), &part(&[3, 1])), Some(Ordering::Less));
        assert_eq!(dominance_cmp(&part(&[3, 1, 1, 1]), &part(&[2, 2, 2])), None);
    }

    #[test]
    fn monomial_sym_small_values() {
        let x = [c(2.0, 0.0), c(3.0, 0.0)];
        assert_eq!(monomial_sym(&Partition::empty(), &x), ONE);
        let v10 = monomial_sym(&part(&[1]), &x);
        assert!((v10 - c(5.0, 0.0)).norm() < 1e-14);
        let v11 = monomial_sym(&part(&[1, 1]), &x);
        assert!((v11 - c(6.0, 0.0)).norm() < 1e-14);
        let v21 = monomial_sym(&part(&[2, 1]), &x);
        // 2²·3 + 3²·2 = 30
        assert!((v21 - c(30.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn schur_small_values_and_triangular_expansion() {
        let x = [c(1.3, 0.2), c(0.7, -0.4), c(-0.9, 0.5)];
        assert!((schur(&Partition::empty(), &x).unwrap() - ONE).norm() < 1e-13);
        let s1 = schur(&part(&[1]), &x).unwrap();
        let e1: C64 = x.iter().sum();
        assert!((s1 - e1).norm() / e1.norm() < 1e-13);

        // s_λ = m_λ + Σ_{μ<λ} u_{λμ} m_μ for |λ| ≤ 4, N ≤ 3: fit the Schur
        // polynomial in the monomial basis and check the triangular shape
        for n_vars in 2..=3usize {
            for d in 1..=4usize {
                let basis = Partition::all_of_weight(d, n_vars);
                let frame = build_fit_frame(n_vars, d, 977 + d as u64).unwrap();
                for lambda in &basis {
                    let coeffs = frame.fit(|pt| schur(lambda, pt).unwrap()).unwrap();
                    for (row, mu) in frame.basis.iter().enumerate() {
                        let v = coeffs[row];
                        if mu == lambda {
                            assert!((v - ONE).norm() < 1e-9, "diagonal {v:?}");
                        } else if dominance_cmp(mu, lambda) == Some(Ordering::Less) {
                            // allowed, any value
                        } else {
                            assert!(v.norm() < 1e-9, "μ={mu:?} λ={lambda:?}: {v:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn omega_series_arithmetic_roundtrip() {
        let a = OmegaSeries::from_coeffs(vec![ONE, c(2.0, 0.0), c(0.0, 1.0)]);
        let b = OmegaSeries::from_coeffs(vec![ONE, c(-1.0, 0.5), c(3.0, 0.0)]);
        let q = a.div(&b).unwrap();
        let back = q.mul(&b);
        for k in 0..=2 {
            assert!((back.coeff(k) - a.coeff(k)).norm() < 1e-13);
        }
        let singular = OmegaSeries::from_coeffs(vec![ZERO, ONE]);
        assert!(matches!(a.div(&singular), Err(KernelError::SeriesInversion(_))));
    }

    #[test]
    fn theta_omega_series_matches_direct_sum() {
        let x = c(0.4, 0.3);
        let s = theta_omega_series(x, 3);
        // n = 0,1 at ω⁰; n = 2,−1 at ω¹; n = 3,−2 at ω³
        assert!((s.coeff(0) - (ONE - x)).norm() < 1e-15);
        let w1 = x * x - ONE / x;
        assert!((s.coeff(1) - w1).norm() < 1e-14);
        assert_eq!(s.coeff(2), ZERO);
        let w3 = -int_power(x, 3) + int_power(x, -2);
        assert!((s.coeff(3) - w3).norm() < 1e-14);
    }

    #[test]
    fn eigenvalue_product_trig_limit_is_linear_product() {
        let u = c(0.3, 0.1);
        let t = c(0.6, 0.1);
        let q = c(0.5, -0.2);
        let lambda = part(&[2, 1]);
        let series = eigenvalue_product(u, &lambda, 2, t, q, 2);
        let expected = (ONE - u * t * q * q) * (ONE - u * q);
        assert!((series.coeff(0) - expected).norm() / expected.norm() < 1e-13);
    }

    #[test]
    fn eigenvalue_of_empty_partition_single_variable_is_theta_series() {
        let u = c(0.43, 0.12);
        let series = eigenvalue_product(u, &Partition::empty(), 1, c(0.6, 0.0), c(0.5, 0.0), 3);
        let theta = theta_omega_series(u, 3);
        for k in 0..=3 {
            assert!((series.coeff(k) - theta.coeff(k)).norm() < 1e-15);
        }
    }

    #[test]
    fn eigenvalue_vanishes_at_the_matching_zero() {
        // u = t^{-(N-1)} q^{-λ₁} kills the leading factor at ω = 0
        let t = c(0.6, 0.1);
        let q = c(0.5, -0.15);
        let lambda = part(&[2, 1]);
        let u = int_power(t, -1) * int_power(q, -2);
        let series = eigenvalue_product(u, &lambda, 2, t, q, 2);
        assert!(series.coeff(0).norm() < 1e-13);
    }

    #[test]
    fn h1_series_reproduces_printed_gl2_value() {
        // ℰ_{1,(1,0)} = −1 − tq + ω (1+qt)(1+q²t²)/(qt) + O(ω²)
        let t = c(0.55, 0.12);
        let q = c(0.4, -0.2);
        let series = h1_eigenvalue_series(&part(&[1]), 2, t, q, 2).unwrap();
        let order0 = -(ONE + t * q);
        let order1 = (ONE + q * t) * (ONE + q * q * t * t) / (q * t);
        assert!((series.coeff(0) - order0).norm() / order0.norm() < 1e-13);
        assert!((series.coeff(1) - order1).norm() / order1.norm() < 1e-13);
    }

    #[test]
    fn h1_series_omega_zero_is_minus_power_sum() {
        let t = c(0.7, 0.0);
        let q = c(0.45, 0.0);
        for (n, lambda) in [(2usize, part(&[2, 1])), (3, part(&[3, 1]))] {
            let series = h1_eigenvalue_series(&lambda, n, t, q, 1).unwrap();
            let expected: C64 = -(0..n)
                .map(|i| int_power(t, (n - 1 - i) as i64) * int_power(q, lambda.part(i) as i64))
                .sum::<C64>();
            assert!((series.coeff(0) - expected).norm() / expected.norm() < 1e-13);
        }
    }

    #[test]
    fn h1_single_particle_is_minus_q_power() {
        let t = c(0.6, 0.0);
        let q = c(0.5, 0.0);
        let series = h1_eigenvalue_series(&part(&[3]), 1, t, q, 0).unwrap();
        let expected = -int_power(q, 3);
        assert!((series.coeff(0) - expected).norm() < 1e-14);
    }

    #[test]
    fn single_variable_operator_matrix_is_theta_value() {
        let u = c(0.37, 0.21);
        let t = c(0.6, 0.05);
        let q = c(0.5, -0.1);
        let omega = c(0.1, 0.0);
        let (basis, m) = operator_matrix(u, t, q, omega, 1, 3, 3, 11).unwrap();
        assert_eq!(basis.len(), 1);
        let expected = theta_omega_series(u * int_power(q, 3), 3).eval(omega);
        assert!((m.get(0, 0) - expected).norm() / expected.norm() < 1e-11);
    }

    #[test]
    fn operator_matrix_is_dominance_triangular_with_product_diagonal() {
        let u = c(0.37, 0.21);
        let t = c(0.62, 0.07);
        let q = c(0.45, -0.12);
        for n_vars in 2..=3usize {
            for d in 1..=3usize {
                for omega in [ZERO, c(0.1, 0.0)] {
                    let (basis, m) = operator_matrix(u, t, q, omega, n_vars, d, 3, 5 + d as u64).unwrap();
                    let scale = m.max_abs();
                    for (row, mu) in basis.iter().enumerate() {
                        for (col, lambda) in basis.iter().enumerate() {
                            let v = m.get(row, col);
                            if dominance_cmp(mu, lambda) == Some(Ordering::Greater) {
                                assert!(
                                    v.norm() < 1e-10 * scale,
                                    "μ={mu:?} λ={lambda:?}: |{}|",
                                    v.norm()
                                );
                            }
                            if row == col {
                                let expected =
                                    eigenvalue_product(u, lambda, n_vars, t, q, 3).eval(omega);
                                assert!(
                                    (v - expected).norm() / expected.norm().max(1e-30) < 1e-10,
                                    "diag at {lambda:?}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fitted_matrix_reproduces_action_at_fresh_points() {
        let u = c(0.41, 0.17);
        let t = c(0.58, 0.09);
        let q = c(0.47, -0.08);
        let omega = c(0.12, 0.0);
        let (basis, m) = operator_matrix(u, t, q, omega, 2, 3, 2, 23).unwrap();
        let mut rng = SplitMix64::new(91);
        for _ in 0..4 {
            let pt: Vec<C64> = (0..2).map(|_| rng.complex_annulus(0.6, 1.4)).collect();
            if (pt[0] - pt[1]).norm() < 0.2 {
                continue;
            }
            for (col, lambda) in basis.iter().enumerate() {
                let direct = operator_action_at(&pt, lambda, u, t, q, omega, 2);
                let via_fit: C64 = basis
                    .iter()
                    .enumerate()
                    .map(|(row, mu)| m.get(row, col) * monomial_sym(mu, &pt))
                    .sum();
                let scale = direct.norm().max(via_fit.norm()).max(1e-30);
                assert!((direct - via_fit).norm() / scale < 1e-10);
            }
        }
    }

    #[test]
    fn component_matrices_share_the_triangular_basis() {
        // every Ô_k block is upper triangular in the same dominance-refining
        // basis
        let t = c(0.6, 0.11);
        let q = c(0.52, -0.06);
        let (basis, mats) =
            operator_component_matrices(t, q, 2, 2, &[0, 1, 2], 2, 31).unwrap();
        for per_weight in &mats {
            for m in per_weight {
                let scale = m.max_abs().max(1e-30);
                for (row, mu) in basis.iter().enumerate() {
                    for (col, lambda) in basis.iter().enumerate() {
                        if dominance_cmp(mu, lambda) == Some(Ordering::Greater) {
                            assert!(m.get(row, col).norm() < 1e-10 * scale);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hamiltonians_commute_on_the_degree_block() {
        let t = c(0.6, 0.11);
        let q = c(0.52, -0.06);
        let r = commutator_residual(t, q, 2, 2, 2, 7).unwrap();
        assert!(r < 1e-10, "residual {r}");
        // single variable: 1×1 matrices commute exactly
        let r1 = commutator_residual(t, q, 1, 2, 2, 7).unwrap();
        assert!(r1 < 1e-14);
    }

    #[test]
    fn commutator_vanishes_in_macdonald_limit() {
        // ω-order 0 block is the trigonometric Ruijsenaars (Macdonald) case
        let t = c(0.66, 0.0);
        let q = c(0.48, 0.0);
        let r = commutator_residual(t, q, 2, 2, 0, 13).unwrap();
        assert!(r < 1e-12, "residual {r}");
    }
}
