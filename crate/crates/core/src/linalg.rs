//! Row-major dense matrices and the handful of dense routines the solvers
//! need: weighted Gram accumulation, Cholesky solves with a relative ridge,
//! and a Jacobi eigendecomposition for PCA.
//!
//! Everything here is `f64`-only and allocation-backed; the dual systems the
//! crate solves are `p x p` with `p` in the tens-to-hundreds, which is well
//! inside the regime where simple unblocked kernels are adequate.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    /// Matrix of zeros.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Builds from a flat row-major buffer. Fails if the length is not `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(Mat { rows, cols, data })
    }

    /// Builds from row slices, which must all have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty("matrix rows"));
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch { expected: cols, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Mat { rows: rows.len(), cols, data })
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

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Index of the first non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|k| (k / self.cols, k % self.cols))
    }

    /// Column means.
    pub fn col_means(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (o, v) in out.iter_mut().zip(self.row(i)) {
                *o += v;
            }
        }
        let inv = 1.0 / self.rows as f64;
        for o in &mut out {
            *o *= inv;
        }
        out
    }

    /// `A^T w`: the weighted sum of rows.
    pub fn weighted_row_sum(&self, w: &[f64]) -> Vec<f64> {
        debug_assert_eq!(w.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &wi) in w.iter().enumerate() {
            if wi == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.row(i)) {
                *o += wi * v;
            }
        }
        out
    }

    /// `A v` for a length-`cols` vector.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Largest row 2-norm; zero for an all-zero matrix.
    pub fn max_row_norm(&self) -> f64 {
        (0..self.rows).fold(0.0, |acc, i| {
            let n = norm2(self.row(i));
            if n > acc {
                n
            } else {
                acc
            }
        })
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(dot(v, v))
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| {
        let a = libm::fabs(*x);
        if a > acc {
            a
        } else {
            acc
        }
    })
}

/// Accumulates the weighted Gram matrix `sum_i w_i m_i m_i^T` (full `p x p`,
/// row-major). Only the upper triangle is computed; the lower is mirrored.
pub fn weighted_gram(m: &Mat, w: &[f64]) -> Vec<f64> {
    debug_assert_eq!(w.len(), m.rows());
    let p = m.cols();
    let mut g = vec![0.0; p * p];
    for (i, &wi) in w.iter().enumerate() {
        if wi == 0.0 {
            continue;
        }
        let row = m.row(i);
        for a in 0..p {
            let wa = wi * row[a];
            if wa == 0.0 {
                continue;
            }
            let dst = &mut g[a * p + a..a * p + p];
            let src = &row[a..];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += wa * s;
            }
        }
    }
    for a in 0..p {
        for b in a + 1..p {
            g[b * p + a] = g[a * p + b];
        }
    }
    g
}

/// In-place Cholesky factorization of a symmetric positive-definite matrix
/// (row-major, `p x p`). On success the lower triangle holds `L` with
/// `L L^T = A`, and the returned value is the count of pivots exceeding a
/// small relative floor — a cheap numerical-rank proxy.
pub fn cholesky_in_place(a: &mut [f64], p: usize) -> Result<usize> {
    let max_diag = (0..p).fold(0.0_f64, |acc, i| {
        let d = a[i * p + i];
        if d > acc {
            d
        } else {
            acc
        }
    });
    let pivot_floor = max_diag * 1e-13;
    let mut rank = 0;
    for j in 0..p {
        let mut d = a[j * p + j];
        for k in 0..j {
            d -= a[j * p + k] * a[j * p + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::SingularHessian);
        }
        if d > pivot_floor {
            rank += 1;
        }
        let d = libm::sqrt(d);
        a[j * p + j] = d;
        let inv = 1.0 / d;
        for i in j + 1..p {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= a[i * p + k] * a[j * p + k];
            }
            a[i * p + j] = s * inv;
        }
    }
    Ok(rank)
}

/// Solves `L L^T x = b` given the Cholesky factor from [`cholesky_in_place`].
pub fn cholesky_solve(l: &[f64], p: usize, b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    for i in 0..p {
        let mut s = x[i];
        for k in 0..i {
            s -= l[i * p + k] * x[k];
        }
        x[i] = s / l[i * p + i];
    }
    for i in (0..p).rev() {
        let mut s = x[i];
        for k in i + 1..p {
            s -= l[k * p + i] * x[k];
        }
        x[i] = s / l[i * p + i];
    }
    x
}

/// Solves the symmetric system `(A + ridge I) x = b` where
/// `ridge = 1e-10 * trace(A) / p`. Returns the solution and the pivot-count
/// rank proxy. Fails with [`Error::SingularHessian`] if the factorization
/// still breaks down after the ridge.
pub fn solve_spd_ridged(a: &[f64], p: usize, b: &[f64]) -> Result<(Vec<f64>, usize)> {
    debug_assert_eq!(a.len(), p * p);
    debug_assert_eq!(b.len(), p);
    let trace: f64 = (0..p).map(|i| a[i * p + i]).sum();
    let ridge = 1e-10 * trace / p as f64;
    let mut work = a.to_vec();
    for i in 0..p {
        work[i * p + i] += ridge;
    }
    let rank = cholesky_in_place(&mut work, p)?;
    Ok((cholesky_solve(&work, p, b), rank))
}

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
///
/// Returns `(eigenvalues, eigenvectors)` sorted by descending eigenvalue;
/// eigenvectors are the rows of the returned matrix.
pub fn jacobi_eigh(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.rows();
    debug_assert_eq!(n, a.cols());
    let mut m = a.data.clone();
    // v starts as identity; accumulates rotations as columns.
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i * n + j] * m[i * n + j];
            }
        }
        if off <= 1e-30 * (1.0 + norm2(&m)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].partial_cmp(&m[i * n + i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (r, &i) in order.iter().enumerate() {
        for k in 0..n {
            vectors.set(r, k, v[k * n + i]);
        }
    }
    (eigenvalues, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_known_system() {
        // A = [[4, 2], [2, 3]], b = [2, 5] -> x = [-0.5, 2]
        let a = vec![4.0, 2.0, 2.0, 3.0];
        let (x, rank) = solve_spd_ridged(&a, 2, &[2.0, 5.0]).unwrap();
        assert!((x[0] + 0.5).abs() < 1e-9 && (x[1] - 2.0).abs() < 1e-9);
        assert_eq!(rank, 2);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = vec![1.0, 2.0, 2.0, 1.0];
        assert!(cholesky_in_place(&mut a, 2).is_err());
    }

    #[test]
    fn weighted_gram_matches_direct() {
        let m = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, -1.0], vec![0.5, 0.0]]).unwrap();
        let w = [0.2, 0.5, 0.3];
        let g = weighted_gram(&m, &w);
        let mut expect = [0.0; 4];
        for i in 0..3 {
            let r = m.row(i);
            for a in 0..2 {
                for b in 0..2 {
                    expect[a * 2 + b] += w[i] * r[a] * r[b];
                }
            }
        }
        for (got, want) in g.iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn jacobi_recovers_spectrum() {
        // Symmetric with known eigenvalues {6, 1}.
        let a = Mat::from_rows(&[vec![5.0, 2.0], vec![2.0, 2.0]]).unwrap();
        let (vals, vecs) = jacobi_eigh(&a);
        assert!((vals[0] - 6.0).abs() < 1e-10);
        assert!((vals[1] - 1.0).abs() < 1e-10);
        // Rows are orthonormal.
        assert!((dot(vecs.row(0), vecs.row(0)) - 1.0).abs() < 1e-12);
        assert!(dot(vecs.row(0), vecs.row(1)).abs() < 1e-12);
        // A v = lambda v.
        for r in 0..2 {
            let v = vecs.row(r);
            let av = a.matvec(v);
            for k in 0..2 {
                assert!((av[k] - vals[r] * v[k]).abs() < 1e-9);
            }
        }
    }
}
