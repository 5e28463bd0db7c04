//! Dense complex matrices with LU factorization.
//!
//! Everything in this crate works on small (N ≤ 8) matrices, so a plain
//! row-major layout with partial-pivot LU is all that is needed. The
//! condition estimate is the crude but reliable ‖A‖₁·‖A⁻¹‖₁ with an explicit
//! inverse, which is exact at these sizes.

use crate::error::{KernelError, Result};
use num_complex::Complex64 as C64;

/// Condition-number ceiling above which inversions are refused.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Diagonal matrix from the given entries.
    pub fn diagonal(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Multiply column j by the j-th entry of d (right diagonal multiplication).
    pub fn scale_cols(&self, d: &[C64]) -> Self {
        assert_eq!(d.len(), self.cols);
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = out.get(i, j) * d[j];
                out.set(i, j, v);
            }
        }
        out
    }

    /// Multiply row i by the i-th entry of d (left diagonal multiplication).
    pub fn scale_rows(&self, d: &[C64]) -> Self {
        assert_eq!(d.len(), self.rows);
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = out.get(i, j) * d[i];
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Entrywise relative distance: max |a_ij − b_ij| / scale, where the scale
    /// is the largest entry modulus of either matrix.
    pub fn rel_distance(&self, other: &Self) -> f64 {
        let scale = self.max_abs().max(other.max_abs()).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for (a, b) in self.data.iter().zip(&other.data) {
            worst = worst.max((a - b).norm());
        }
        worst / scale
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> LuFactors {
        assert_eq!(self.rows, self.cols, "LU requires a square matrix");
        let n = self.rows;
        let mut lu = self.clone();
        let mut pivots = Vec::with_capacity(n);
        let mut parity = 1.0f64;
        for col in 0..n {
            let mut pivot_row = col;
            let mut best = lu.get(col, col).norm();
            for r in (col + 1)..n {
                let mag = lu.get(r, col).norm();
                if mag > best {
                    best = mag;
                    pivot_row = r;
                }
            }
            if pivot_row != col {
                for j in 0..n {
                    let a = lu.get(col, j);
                    let b = lu.get(pivot_row, j);
                    lu.set(col, j, b);
                    lu.set(pivot_row, j, a);
                }
                parity = -parity;
            }
            pivots.push(pivot_row);
            let p = lu.get(col, col);
            if p.norm() == 0.0 {
                continue; // singular: leave the zero pivot, det comes out 0
            }
            for r in (col + 1)..n {
                let factor = lu.get(r, col) / p;
                lu.set(r, col, factor);
                for j in (col + 1)..n {
                    let v = lu.get(r, j) - factor * lu.get(col, j);
                    lu.set(r, j, v);
                }
            }
        }
        LuFactors { lu, pivots, parity }
    }

    pub fn det(&self) -> C64 {
        self.lu().det()
    }

    /// Inverse via LU. Fails with `NearSingular` on a zero pivot.
    pub fn inverse(&self) -> Result<Self> {
        let f = self.lu();
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        for j in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            let x = f.solve(&e)?;
            for i in 0..n {
                inv.set(i, j, x[i]);
            }
        }
        Ok(inv)
    }

    /// Inverse guarded by the condition estimate ‖A‖₁‖A⁻¹‖₁ ≤ limit.
    pub fn inverse_guarded(&self, limit: f64) -> Result<Self> {
        let inv = self.inverse()?;
        let cond = self.one_norm() * inv.one_norm();
        if !cond.is_finite() || cond > limit {
            return Err(KernelError::IllConditioned { cond });
        }
        Ok(inv)
    }

    pub fn condition_estimate(&self) -> f64 {
        match self.inverse() {
            Ok(inv) => self.one_norm() * inv.one_norm(),
            Err(_) => f64::INFINITY,
        }
    }
}

/// Result of `ComplexMatrix::lu`.
pub struct LuFactors {
    lu: ComplexMatrix,
    pivots: Vec<usize>,
    parity: f64,
}

impl LuFactors {
    pub fn det(&self) -> C64 {
        let mut d = C64::new(self.parity, 0.0);
        for i in 0..self.lu.rows() {
            d *= self.lu.get(i, i);
        }
        d
    }

    /// Solve A x = b with the stored factors.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.lu.rows();
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for (col, &p) in self.pivots.iter().enumerate() {
            x.swap(col, p);
        }
        // forward substitution (unit lower triangle)
        for i in 0..n {
            for j in 0..i {
                let f = self.lu.get(i, j);
                let xi = x[i] - f * x[j];
                x[i] = xi;
            }
        }
        // back substitution
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let f = self.lu.get(i, j);
                let xi = x[i] - f * x[j];
                x[i] = xi;
            }
            let p = self.lu.get(i, i);
            if p.norm() == 0.0 {
                return Err(KernelError::NearSingular { magnitude: 0.0 });
            }
            x[i] /= p;
        }
        Ok(x)
    }
}
