//! Dense vectors and matrices, just large enough for this crate.
//!
//! Vectors are plain `&[f64]` / `Vec<f64>`; the solvers are matrix-free and
//! only the direct subproblem back-end, the exact-resolvent oracle, and the
//! problem generators touch dense matrices. Row-major storage, partial-pivot
//! LU, Householder QR.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Euclidean norm.
#[inline]
pub fn norm(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

/// Euclidean distance `||a - b||`.
#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        s += d * d;
    }
    math::sqrt(s)
}

/// `y += alpha * x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for i in 0..x.len() {
        y[i] += alpha * x[i];
    }
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(alpha: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| alpha * x).collect()
}

#[inline]
pub fn scale_in_place(alpha: f64, a: &mut [f64]) {
    for x in a.iter_mut() {
        *x *= alpha;
    }
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

// ---------------------------------------------------------------------------
// Dense matrices
// ---------------------------------------------------------------------------

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "matvec_transpose dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, xi) in x.iter().enumerate() {
            let row = self.row(i);
            for j in 0..self.cols {
                out[j] += row[j] * xi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let row_k = other.row(k);
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for j in 0..other.cols {
                    out_row[j] += a * row_k[j];
                }
            }
        }
        out
    }

    /// `self + alpha * other`, elementwise.
    pub fn add_scaled(&self, alpha: f64, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + alpha * b)
            .collect();
        DenseMatrix::from_rows(self.rows, self.cols, data)
    }

    pub fn scaled(&self, alpha: f64) -> DenseMatrix {
        DenseMatrix::from_rows(self.rows, self.cols, scale(alpha, &self.data))
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (j, s) in sums.iter_mut().enumerate() {
                *s += self[(i, j)].abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum())
            .fold(0.0, f64::max)
    }

    /// Solve `self * x = b` by partial-pivot LU. `self` is consumed as the
    /// factorization workspace.
    pub fn solve_into(mut self, mut b: Vec<f64>) -> Result<Vec<f64>, SingularMatrix> {
        let n = self.rows;
        assert_eq!(self.cols, n, "solve requires a square matrix");
        assert_eq!(b.len(), n, "rhs length mismatch");
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut pivot = col;
            let mut best = self[(col, col)].abs();
            for r in col + 1..n {
                let v = self[(r, col)].abs();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(SingularMatrix { column: col });
            }
            if pivot != col {
                for j in 0..n {
                    self.data.swap(col * n + j, pivot * n + j);
                }
                b.swap(col, pivot);
                perm.swap(col, pivot);
            }
            let d = self[(col, col)];
            for r in col + 1..n {
                let f = self[(r, col)] / d;
                if f == 0.0 {
                    continue;
                }
                self[(r, col)] = 0.0;
                for j in col + 1..n {
                    let v = self[(col, j)];
                    self[(r, j)] -= f * v;
                }
                b[r] -= f * b[col];
            }
        }
        // back substitution
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..n {
                s -= self[(i, j)] * x[j];
            }
            x[i] = s / self[(i, i)];
        }
        Ok(x)
    }

    /// Convenience solve that clones the matrix.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, SingularMatrix> {
        self.clone().solve_into(b.to_vec())
    }

    /// Largest singular value estimate by power iteration on `AᵀA`.
    ///
    /// Deterministic start vector; returns the last Rayleigh estimate. The
    /// value approaches the true norm from below.
    pub fn spectral_norm_estimate(&self, iters: usize) -> f64 {
        let n = self.cols;
        if n == 0 || self.rows == 0 {
            return 0.0;
        }
        // Fixed pseudo-random start so no singular direction is missed by
        // symmetry accidents; deterministic across runs.
        let mut v: Vec<f64> = (0..n)
            .map(|i| {
                let t = (i as f64 + 1.0) * 0.754_877_666;
                1.0 + (t - ceil_frac(t))
            })
            .collect();
        let nv = norm(&v);
        if nv == 0.0 {
            return 0.0;
        }
        scale_in_place(1.0 / nv, &mut v);
        let mut sigma = 0.0;
        for _ in 0..iters.max(1) {
            let w = self.matvec(&v);
            let new_sigma = norm(&w);
            if new_sigma == 0.0 || !new_sigma.is_finite() {
                return new_sigma.max(0.0);
            }
            let mut u = self.matvec_transpose(&w);
            let nu = norm(&u);
            if nu == 0.0 {
                return new_sigma;
            }
            scale_in_place(1.0 / nu, &mut u);
            let stagnant = (new_sigma - sigma).abs() <= 1e-13 * new_sigma;
            sigma = new_sigma;
            v = u;
            if stagnant {
                break;
            }
        }
        sigma
    }
}

#[inline]
fn ceil_frac(t: f64) -> f64 {
    // fract() without std: t - floor(t) for positive t
    let f = t as u64 as f64;
    t - f
}

impl core::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization hit an exactly zero (or non-finite) pivot column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularMatrix {
    pub column: usize,
}

impl core::fmt::Display for SingularMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "singular or non-finite system at column {}", self.column)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SingularMatrix {}

/// QR decomposition by Householder reflections; returns `Q` (square,
/// orthogonal) and the signs of the diagonal of `R`.
///
/// Used by the Haar-orthogonal sampler: absorbing `sign(diag R)` into `Q`
/// makes the distribution of `Q` uniform over the orthogonal group when the
/// input has i.i.d. Gaussian entries.
pub fn householder_qr_q(a: &DenseMatrix) -> (DenseMatrix, Vec<f64>) {
    let n = a.rows();
    assert_eq!(a.cols(), n, "qr_q expects a square matrix");
    let mut r = a.clone();
    let mut q = DenseMatrix::identity(n);
    let mut w = vec![0.0; n];
    for k in 0..n {
        // Householder vector for column k below the diagonal.
        let mut alpha = 0.0;
        for i in k..n {
            alpha += r[(i, k)] * r[(i, k)];
        }
        let alpha = math::sqrt(alpha);
        if alpha == 0.0 {
            continue;
        }
        let alpha = if r[(k, k)] > 0.0 { -alpha } else { alpha };
        for (i, wi) in w.iter_mut().enumerate().take(n).skip(k) {
            *wi = r[(i, k)];
        }
        w[k] -= alpha;
        let wnorm2 = {
            let mut s = 0.0;
            for wi in w.iter().take(n).skip(k) {
                s += wi * wi;
            }
            s
        };
        if wnorm2 == 0.0 {
            continue;
        }
        // r <- (I - 2 w wᵀ / |w|²) r ; q <- q (I - 2 w wᵀ / |w|²)
        for j in k..n {
            let mut s = 0.0;
            for i in k..n {
                s += w[i] * r[(i, j)];
            }
            let f = 2.0 * s / wnorm2;
            for i in k..n {
                r[(i, j)] -= f * w[i];
            }
        }
        for i in 0..n {
            let mut s = 0.0;
            for (j, wj) in w.iter().enumerate().take(n).skip(k) {
                s += q[(i, j)] * wj;
            }
            let f = 2.0 * s / wnorm2;
            for (j, wj) in w.iter().enumerate().take(n).skip(k) {
                q[(i, j)] -= f * wj;
            }
        }
    }
    let diag_signs = (0..n)
        .map(|i| if r[(i, i)] < 0.0 { -1.0 } else { 1.0 })
        .collect();
    (q, diag_signs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        // [2 1; 1 3] x = [5; 10] -> x = [1; 3]
        let m = DenseMatrix::from_rows(2, 2, vec![2.0, 1.0, 1.0, 3.0]);
        let x = m.solve(&[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn lu_needs_pivoting() {
        // Zero top-left entry forces a row swap.
        let m = DenseMatrix::from_rows(2, 2, vec![0.0, 1.0, 1.0, 0.0]);
        let x = m.solve(&[2.0, 3.0]).unwrap();
        assert_eq!(x, vec![3.0, 2.0]);
    }

    #[test]
    fn lu_reports_singular() {
        let m = DenseMatrix::from_rows(2, 2, vec![1.0, 2.0, 2.0, 4.0]);
        assert!(m.solve(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn lu_residual_at_machine_scale() {
        // Moderately conditioned 30x30 system: residual stays tiny.
        let n = 30;
        let m = DenseMatrix::from_fn(n, n, |i, j| {
            if i == j {
                4.0
            } else {
                1.0 / (1.0 + (i as f64 - j as f64).abs())
            }
        });
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = m.solve(&b).unwrap();
        let r = sub(&m.matvec(&x), &b);
        assert!(norm(&r) <= 1e-12 * norm(&b).max(1.0));
    }

    #[test]
    fn qr_q_is_orthogonal() {
        let n = 12;
        let a = DenseMatrix::from_fn(n, n, |i, j| ((3 * i + 7 * j + 1) as f64).sin());
        let (q, _) = householder_qr_q(&a);
        let qtq = q.transpose().matmul(&q);
        let mut max_err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                max_err = max_err.max((qtq[(i, j)] - want).abs());
            }
        }
        assert!(max_err < 1e-12, "Q not orthogonal: {max_err}");
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = DenseMatrix::from_fn(5, 5, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
        let est = m.spectral_norm_estimate(200);
        assert!((est - 5.0).abs() < 1e-9, "est={est}");
    }

    #[test]
    fn spectral_norm_of_rotation_is_one() {
        let m = DenseMatrix::from_rows(2, 2, vec![0.0, 1.0, -1.0, 0.0]);
        let est = m.spectral_norm_estimate(50);
        assert!((est - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matvec_transpose_agrees() {
        let m = DenseMatrix::from_fn(3, 4, |i, j| (i * 4 + j) as f64);
        let x = [1.0, -2.0, 0.5];
        let got = m.matvec_transpose(&x);
        let want = m.transpose().matvec(&x);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-14);
        }
    }
}
