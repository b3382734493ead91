//! Shared oracles for the integration suites. Everything here is
//! deliberately independent of the library's solution paths: feasibility is
//! decided by a phase-1 simplex, matrices are inverted by Gauss-Jordan, and
//! optima are located by brute-force grids over the feasible set.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use gel_core::linalg::Mat;
use gel_core::rng::Rng;

/// Phase-1 simplex: does some `w >= 0` with `sum w = 1` satisfy
/// `P^T w = target`? Exact convex-hull membership for small instances.
pub fn convex_feasible_lp(points: &Mat, target: &[f64], tol: f64) -> bool {
    let n = points.rows();
    let p = points.cols();
    let m = p + 1;
    let cols = n + m + 1; // variables, artificials, rhs

    let mut tab = vec![vec![0.0f64; cols]; m];
    for r in 0..m {
        for i in 0..n {
            tab[r][i] = if r < p { points.get(i, r) } else { 1.0 };
        }
        tab[r][cols - 1] = if r < p { target[r] } else { 1.0 };
        if tab[r][cols - 1] < 0.0 {
            for v in tab[r].iter_mut() {
                *v = -*v;
            }
        }
        tab[r][n + r] = 1.0;
    }

    // Phase-1 objective: minimize the artificial sum. With the artificial
    // basis, the reduced-cost row is the column sum of the constraint rows.
    let mut obj = vec![0.0f64; cols];
    for r in 0..m {
        for j in 0..cols {
            obj[j] += tab[r][j];
        }
    }
    for j in n..n + m {
        obj[j] = 0.0;
    }

    let mut basis: Vec<usize> = (n..n + m).collect();
    for _ in 0..10_000 {
        // Bland's rule: smallest improving non-artificial column.
        let Some(enter) = (0..n).find(|&j| obj[j] > tol) else {
            break;
        };
        let mut leave = None;
        let mut best = f64::INFINITY;
        for r in 0..m {
            if tab[r][enter] > tol {
                let ratio = tab[r][cols - 1] / tab[r][enter];
                if ratio < best - 1e-12 {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(r) = leave else {
            break; // unbounded direction cannot happen on the simplex
        };
        let pivot = tab[r][enter];
        for v in tab[r].iter_mut() {
            *v /= pivot;
        }
        for rr in 0..m {
            if rr != r && tab[rr][enter].abs() > 0.0 {
                let f = tab[rr][enter];
                for j in 0..cols {
                    tab[rr][j] -= f * tab[r][j];
                }
            }
        }
        let f = obj[enter];
        for j in 0..cols {
            obj[j] -= f * tab[r][j];
        }
        basis[r] = enter;
    }

    // Remaining artificial mass.
    let infeasibility: f64 = basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= n)
        .map(|(r, _)| tab[r][cols - 1])
        .sum();
    infeasibility <= tol
}

/// Gauss-Jordan inverse with partial pivoting; panics on singular input.
pub fn invert(matrix: &[f64], p: usize) -> Vec<f64> {
    let mut a = matrix.to_vec();
    let mut inv = vec![0.0; p * p];
    for i in 0..p {
        inv[i * p + i] = 1.0;
    }
    for col in 0..p {
        let pivot_row = (col..p)
            .max_by(|&a_, &b_| a[a_ * p + col].abs().partial_cmp(&a[b_ * p + col].abs()).unwrap())
            .unwrap();
        assert!(a[pivot_row * p + col].abs() > 1e-14, "singular matrix");
        if pivot_row != col {
            for j in 0..p {
                a.swap(col * p + j, pivot_row * p + j);
                inv.swap(col * p + j, pivot_row * p + j);
            }
        }
        let d = a[col * p + col];
        for j in 0..p {
            a[col * p + j] /= d;
            inv[col * p + j] /= d;
        }
        for r in 0..p {
            if r != col {
                let f = a[r * p + col];
                if f != 0.0 {
                    for j in 0..p {
                        a[r * p + j] -= f * a[col * p + j];
                        inv[r * p + j] -= f * inv[col * p + j];
                    }
                }
            }
        }
    }
    inv
}

/// Random matrix with standard-normal entries.
pub fn randn_mat(rng: &mut Rng, rows: usize, cols: usize) -> Mat {
    let mut m = Mat::zeros(rows, cols);
    for i in 0..rows {
        for v in m.row_mut(i) {
            *v = rng.normal();
        }
    }
    m
}

/// Centers columns so the row sum is exactly zero (uniform weights become
/// feasible, putting the target strictly inside the hull").
pub fn center_columns(m: &mut Mat) {
    let means = m.col_means();
    for i in 0..m.rows() {
        for (v, mu) in m.row_mut(i).iter_mut().zip(&means) {
            *v -= mu;
        }
    }
}

/// Orthonormal basis of the nullspace of the constraint matrix
/// `[1^T; M^T]` (the directions along which simplex-feasible weights may
/// move without breaking the moment condition).
pub fn feasible_nullspace(m: &Mat) -> Vec<Vec<f64>> {
    let n = m.rows();
    let p = m.cols();
    // Orthonormalize the constraint rows.
    let mut constraints: Vec<Vec<f64>> = Vec::new();
    let mut cand: Vec<Vec<f64>> = Vec::new();
    cand.push(vec![1.0; n]);
    for c in 0..p {
        cand.push((0..n).map(|i| m.get(i, c)).collect());
    }
    for mut v in cand {
        for c in &constraints {
            let proj: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= proj * ci;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-10 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            constraints.push(v);
        }
    }
    // Project unit vectors out of the constraint span and orthonormalize.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for k in 0..n {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        for c in constraints.iter().chain(basis.iter()) {
            let proj: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= proj * ci;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            basis.push(v);
        }
    }
    basis
}

/// Brute-force longest common subsequence by enumerating every subsequence
/// of the shorter input and testing it against the longer one.
pub fn lcs_brute_force(a: &[u8], b: &[u8]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut best = 0;
    for mask in 0u32..(1 << short.len()) {
        let len = mask.count_ones() as usize;
        if len <= best {
            continue;
        }
        let mut it = long.iter();
        let mut ok = true;
        for (i, &ch) in short.iter().enumerate() {
            if mask & (1 << i) != 0 && !it.any(|&c| c == ch) {
                ok = false;
                break;
            }
        }
        if ok {
            best = len;
        }
    }
    best
}
