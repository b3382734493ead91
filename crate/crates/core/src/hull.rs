//! Approximate convex-hull membership via the randomized triangle algorithm.
//!
//! The feasibility precondition of the EL and ET objectives is geometric:
//! the zero vector must lie in the convex hull of the moment rows, otherwise
//! no reweighting satisfies the constraint and the divergence is infinite.
//! The triangle algorithm (Kalantari 2015) decides this approximately: it
//! either exhibits a convex combination within `epsilon` of the target, or a
//! witness point certifying separation.
//!
//! The witness certificate is exact: a point `x` in the hull with
//! `|x - p_i| < |t - p_i|` for every input point proves the bisecting
//! hyperplane of `x` and `t` separates `t` from the hull.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{norm2, Mat};
use crate::rng::Rng;
use crate::{Error, Result};

/// Outcome of a membership query.
#[derive(Debug, Clone, PartialEq)]
pub enum HullVerdict {
    /// `target` is within `distance <= epsilon * scale` of the hull,
    /// achieved by the returned convex `coefficients`.
    Inside {
        coefficients: Vec<f64>,
        distance: f64,
        iterations: usize,
    },
    /// `target` is certifiably outside: `witness` is a hull point strictly
    /// closer than `target` to every input point, and `direction`
    /// (`target - witness`) is the normal of a separating hyperplane.
    /// The hull is at least `distance / 2` away from the target.
    Outside {
        witness: Vec<f64>,
        direction: Vec<f64>,
        distance: f64,
        iterations: usize,
    },
    /// The iteration budget ran out before either certificate was found.
    /// Callers that must never attempt an infeasible solve should treat
    /// this as `Outside`; callers with a divergence backstop may proceed.
    Indeterminate { distance: f64, iterations: usize },
}

impl HullVerdict {
    pub fn is_inside(&self) -> bool {
        matches!(self, HullVerdict::Inside { .. })
    }

    pub fn is_outside(&self) -> bool {
        matches!(self, HullVerdict::Outside { .. })
    }
}

/// Decides whether `target` lies in the convex hull of the rows of `points`.
///
/// `epsilon` is relative to the largest row 2-norm. The pivot scan order is
/// shuffled deterministically from `seed`, so identical inputs produce
/// identical verdicts and witnesses.
pub fn hull_membership(
    points: &Mat,
    target: &[f64],
    epsilon: f64,
    seed: u64,
    max_iterations: usize,
) -> Result<HullVerdict> {
    let n = points.rows();
    let p = points.cols();
    if n == 0 {
        return Err(Error::Empty("hull points"));
    }
    if target.len() != p {
        return Err(Error::DimensionMismatch { expected: p, got: target.len() });
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidConfig("hull epsilon must be positive"));
    }

    let scale = points.max_row_norm();
    let tol = epsilon * scale;

    // Squared distance of every point to the target; the pivot test
    // |x - p_i| >= |t - p_i| only needs these plus dot products.
    let dist_t_sq: Vec<f64> = (0..n)
        .map(|i| {
            points
                .row(i)
                .iter()
                .zip(target)
                .map(|(a, b)| (a - b) * (a - b))
                .sum()
        })
        .collect();

    // Start from the point nearest the target.
    let start = (0..n)
        .min_by(|&a, &b| dist_t_sq[a].partial_cmp(&dist_t_sq[b]).unwrap())
        .unwrap();
    let mut x: Vec<f64> = points.row(start).to_vec();
    let mut coeff = vec![0.0; n];
    coeff[start] = 1.0;

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = Rng::seed_from_u64(seed);
    rng.shuffle(&mut order);

    let mut gap = vec![0.0; p];
    for iter in 0..max_iterations {
        for (g, (t, xv)) in gap.iter_mut().zip(target.iter().zip(&x)) {
            *g = t - xv;
        }
        let dist = norm2(&gap);
        if dist <= tol {
            return Ok(HullVerdict::Inside { coefficients: coeff, distance: dist, iterations: iter });
        }

        // A pivot is any point at least as close to the target as to the
        // current iterate: |x - p| >= |t - p|, i.e. 2 p.(t - x) >= |t|^2 - |x|^2.
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let tt: f64 = target.iter().map(|v| v * v).sum();
        let threshold = (tt - xx) / 2.0;
        let mut pivot = None;
        for &i in &order {
            let row = points.row(i);
            let proj: f64 = row.iter().zip(&gap).map(|(a, g)| a * g).sum();
            if proj >= threshold {
                pivot = Some(i);
                break;
            }
        }

        let Some(i) = pivot else {
            // No pivot: x is a witness, every hull point is closer to x
            // than target is, so target is strictly outside.
            return Ok(HullVerdict::Outside {
                witness: x,
                direction: gap,
                distance: dist,
                iterations: iter,
            });
        };

        // Move to the nearest point to the target on the segment [x, p_i].
        let row = points.row(i);
        let mut px_dot_gap = 0.0;
        let mut px_sq = 0.0;
        for ((pv, xv), g) in row.iter().zip(&x).zip(&gap) {
            let d = pv - xv;
            px_dot_gap += d * g;
            px_sq += d * d;
        }
        let beta = if px_sq > 0.0 { (px_dot_gap / px_sq).clamp(0.0, 1.0) } else { 0.0 };
        for (xv, pv) in x.iter_mut().zip(row) {
            *xv += beta * (pv - *xv);
        }
        for c in coeff.iter_mut() {
            *c *= 1.0 - beta;
        }
        coeff[i] += beta;

        // Pivoting on a rotating start keeps the scan order fair without
        // reshuffling every iteration.
        order.rotate_left(1);
    }

    let dist = {
        for (g, (t, xv)) in gap.iter_mut().zip(target.iter().zip(&x)) {
            *g = t - xv;
        }
        norm2(&gap)
    };
    Ok(HullVerdict::Indeterminate { distance: dist, iterations: max_iterations })
}

/// Iteration budget used by the solvers' feasibility precheck: generous for
/// small problems, bounded by total work (`budget * n * p`) for large ones.
pub fn default_budget(n: usize, p: usize) -> usize {
    let work = n.saturating_mul(p).max(1);
    (300_000_000 / work).clamp(2_000, 100_000)
}
