//! Two-sample GEL: weights on both the data and the model sample.
//!
//! One-sample tests break down when the model generates points far outside
//! the data distribution: the moment target leaves the hull and every score
//! is infinite. The two-sample form assigns weights `pi` to data points and
//! `psi` to model points, requiring only that the two weighted moment means
//! agree — geometrically, that the two hulls intersect.
//!
//! Computationally everything reduces to a one-sample problem through a
//! change of variables: stack rows `[m_i, +1]` for the data side and
//! `[-m'_j, -1]` for the model side. The augmented coordinate forces each
//! group to carry exactly half of the stacked mass, and the stacked weights
//! rescale to per-side weights. For the exponential-tilting member this is
//! an identity on duals; for empirical likelihood the stacked objective
//! differs from the two-sample one by an additive constant only, so the
//! optimizers coincide. The Euclidean member is solved exactly as a joint
//! equality-constrained QP.

use alloc::vec;
use alloc::vec::Vec;

use crate::kernel::KernelSpec;
use crate::linalg::{dot, norm2, solve_spd_ridged, Mat};
use crate::moments::{witness_row, FeatureSet, WitnessSet};
use crate::solver::{
    el_newton, equilibrate_columns, et_newton, hull_precheck_failed, DivergenceKind, NewtonStatus,
    SolveStatus, SolverConfig, ZERO_WEIGHT_CUTOFF,
};
use crate::{Error, Result};

const LN_2: f64 = core::f64::consts::LN_2;

/// Stacked two-sample moment system.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSampleMoments {
    stacked: Mat,
    n_data: usize,
    n_model: usize,
}

impl TwoSampleMoments {
    /// The `(n + m) x (p + 1)` stacked matrix.
    pub fn stacked(&self) -> &Mat {
        &self.stacked
    }

    pub fn n_data(&self) -> usize {
        self.n_data
    }

    pub fn n_model(&self) -> usize {
        self.n_model
    }

    /// Unequal sample counts leave an O(1/n) bias between the two sides'
    /// divergences; flagged so reports can carry the caveat.
    pub fn size_mismatch(&self) -> bool {
        self.n_data != self.n_model
    }
}

/// Stacks per-side moment rows into the augmented one-sample system:
/// data rows become `[m_i, +1]`, model rows `[-m'_j, -1]`.
pub fn stack_two_sample(data_moments: &Mat, model_moments: &Mat) -> Result<TwoSampleMoments> {
    if data_moments.rows() == 0 || model_moments.rows() == 0 {
        return Err(Error::Empty("two-sample moments"));
    }
    if data_moments.cols() != model_moments.cols() {
        return Err(Error::DimensionMismatch {
            expected: data_moments.cols(),
            got: model_moments.cols(),
        });
    }
    let n = data_moments.rows();
    let m = model_moments.rows();
    let p = data_moments.cols();
    let mut stacked = Mat::zeros(n + m, p + 1);
    for i in 0..n {
        let row = stacked.row_mut(i);
        row[..p].copy_from_slice(data_moments.row(i));
        row[p] = 1.0;
    }
    for j in 0..m {
        let row = stacked.row_mut(n + j);
        for (dst, src) in row[..p].iter_mut().zip(model_moments.row(j)) {
            *dst = -src;
        }
        row[p] = -1.0;
    }
    if let Some((row, col)) = stacked.first_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    Ok(TwoSampleMoments { stacked, n_data: n, n_model: m })
}

/// Result of a two-sample solve. `pi` weights the data side, `psi` the
/// model side; each sums to one on convergence and the weighted moment
/// means agree.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSampleSolution {
    pub status: SolveStatus,
    pub pi: Vec<f64>,
    pub psi: Vec<f64>,
    pub dual: Vec<f64>,
    pub divergence_data_nats: f64,
    pub divergence_data_bits: f64,
    pub divergence_model_nats: f64,
    pub divergence_model_bits: f64,
    /// `2^divergence_model_bits`; conventionally printed first.
    pub score_model: f64,
    /// `2^divergence_data_bits`.
    pub score_data: f64,
    /// Model samples reported with exactly zero weight (alpha).
    pub zero_count_model: usize,
    /// Data samples reported with exactly zero weight (beta).
    pub zero_count_data: usize,
    pub iterations: usize,
    pub final_grad_norm: f64,
    pub size_mismatch_warning: bool,
}

impl TwoSampleSolution {
    fn infinite(
        status: SolveStatus,
        dual: Vec<f64>,
        iterations: usize,
        grad_norm: f64,
        size_mismatch: bool,
    ) -> Self {
        TwoSampleSolution {
            status,
            pi: Vec::new(),
            psi: Vec::new(),
            dual,
            divergence_data_nats: f64::INFINITY,
            divergence_data_bits: f64::INFINITY,
            divergence_model_nats: f64::INFINITY,
            divergence_model_bits: f64::INFINITY,
            score_model: f64::INFINITY,
            score_data: f64::INFINITY,
            zero_count_model: 0,
            zero_count_data: 0,
            iterations,
            final_grad_norm: grad_norm,
            size_mismatch_warning: size_mismatch,
        }
    }
}

fn el_side_divergence(w: &[f64]) -> f64 {
    let n = w.len() as f64;
    -w.iter().map(|&v| libm::log(n * v)).sum::<f64>() / n
}

fn et_side_divergence(w: &[f64]) -> f64 {
    let n = w.len() as f64;
    w.iter().filter(|&&v| v > 0.0).map(|&v| v * libm::log(n * v)).sum()
}

fn count_zeros(w: &[f64]) -> usize {
    w.iter().filter(|&&v| v <= ZERO_WEIGHT_CUTOFF).count()
}

/// Solves the stacked system for the chosen divergence.
pub fn solve_two_sample(
    stacked: &TwoSampleMoments,
    divergence: DivergenceKind,
    config: &SolverConfig,
) -> Result<TwoSampleSolution> {
    config.validate()?;
    let n = stacked.n_data;
    let mismatch = stacked.size_mismatch();

    if divergence == DivergenceKind::Euclidean {
        return solve_two_sample_euclidean(stacked, config);
    }

    // Feasibility: 0 in the hull of the stacked rows, which holds exactly
    // when the two per-side moment hulls intersect.
    let rows = &stacked.stacked;
    if hull_precheck_failed(rows, config)? {
        return Ok(TwoSampleSolution::infinite(
            SolveStatus::HullFail,
            Vec::new(),
            0,
            f64::NAN,
            mismatch,
        ));
    }

    let out = match divergence {
        DivergenceKind::EmpiricalLikelihood => el_newton(rows, config)?,
        DivergenceKind::ExponentialTilting => et_newton(rows, config)?,
        DivergenceKind::Euclidean => unreachable!(),
    };

    match out.status {
        NewtonStatus::DivergedInfinite => Ok(TwoSampleSolution::infinite(
            SolveStatus::DivergedInfinite,
            out.lambda,
            out.iterations,
            out.final_grad_norm,
            mismatch,
        )),
        NewtonStatus::Converged | NewtonStatus::MaxIterations => {
            let converged = matches!(out.status, NewtonStatus::Converged);
            let xi = out.weights;
            let g_data: f64 = xi[..n].iter().sum();
            let g_model: f64 = xi[n..].iter().sum();
            // The augmented coordinate pins each group at half the stacked
            // mass; dividing by the group sum is the exact per-side rescale.
            let mut pi: Vec<f64> = xi[..n].iter().map(|&v| v / g_data).collect();
            let mut psi: Vec<f64> = xi[n..].iter().map(|&v| v / g_model).collect();

            if divergence == DivergenceKind::ExponentialTilting {
                for side in [&mut pi, &mut psi] {
                    let mut sum = 0.0;
                    for w in side.iter_mut() {
                        if *w < ZERO_WEIGHT_CUTOFF {
                            *w = 0.0;
                        }
                        sum += *w;
                    }
                    for w in side.iter_mut() {
                        *w /= sum;
                    }
                }
            }

            let (d_data, d_model) = match divergence {
                DivergenceKind::EmpiricalLikelihood => {
                    (el_side_divergence(&pi), el_side_divergence(&psi))
                }
                DivergenceKind::ExponentialTilting => {
                    (et_side_divergence(&pi), et_side_divergence(&psi))
                }
                DivergenceKind::Euclidean => unreachable!(),
            };

            Ok(TwoSampleSolution {
                status: if converged { SolveStatus::Converged } else { SolveStatus::MaxIterations },
                zero_count_model: count_zeros(&psi),
                zero_count_data: count_zeros(&pi),
                pi,
                psi,
                dual: out.lambda,
                divergence_data_nats: d_data,
                divergence_data_bits: d_data / LN_2,
                divergence_model_nats: d_model,
                divergence_model_bits: d_model / LN_2,
                score_model: libm::exp(d_model),
                score_data: libm::exp(d_data),
                iterations: out.iterations,
                final_grad_norm: out.final_grad_norm,
                size_mismatch_warning: mismatch,
            })
        }
    }
}

/// Joint Euclidean QP: `min 1/2 |pi - 1/n|^2 + 1/2 |psi - 1/m|^2` subject
/// to matching weighted moment means and unit sums. The KKT system is a
/// single symmetric `(p + 2)`-dimensional solve; always finite.
fn solve_two_sample_euclidean(
    stacked: &TwoSampleMoments,
    _config: &SolverConfig,
) -> Result<TwoSampleSolution> {
    let n = stacked.n_data;
    let m = stacked.n_model;
    let p = stacked.stacked.cols() - 1;
    // Per-side weights are invariant under column rescaling of the moment
    // coordinates (the constraint set is unchanged); equilibrate for the
    // KKT factorization's sake.
    let (rows, _scales) = equilibrate_columns(&stacked.stacked);
    let rows = &rows;

    // Recover the per-side rows from the stacked representation; model
    // rows come back negated and stay negated below.
    let data_row = |i: usize| &rows.row(i)[..p];
    let model_row = |j: usize| &rows.row(n + j)[..p];

    let q = p + 2;
    let mut kkt = vec![0.0; q * q];
    let mut rhs = vec![0.0; q];

    // Gram block: M^T M + M'^T M'.
    for i in 0..n + m {
        let r = &rows.row(i)[..p];
        for a in 0..p {
            for b in a..p {
                kkt[a * q + b] += r[a] * r[b];
            }
        }
    }
    // Coupling with the two sum constraints and the right-hand side.
    for i in 0..n {
        let r = data_row(i);
        for a in 0..p {
            kkt[a * q + p] += r[a];
            rhs[a] += r[a] / n as f64;
        }
    }
    for j in 0..m {
        let r = model_row(j);
        for a in 0..p {
            // model rows are stored negated: -m'_j
            kkt[a * q + p + 1] += r[a];
            rhs[a] += r[a] / m as f64;
        }
    }
    kkt[p * q + p] = n as f64;
    kkt[(p + 1) * q + p + 1] = m as f64;
    for a in 0..q {
        for b in a + 1..q {
            kkt[b * q + a] = kkt[a * q + b];
        }
    }

    let (mu, _) = solve_spd_ridged(&kkt, q, &rhs)?;

    let mut pi = vec![0.0; n];
    for (i, w) in pi.iter_mut().enumerate() {
        *w = 1.0 / n as f64 - (dot(data_row(i), &mu[..p]) + mu[p]);
    }
    let mut psi = vec![0.0; m];
    for (j, w) in psi.iter_mut().enumerate() {
        // stored row is -m'_j, so the KKT term for psi_j is -(-m'_j . mu).
        *w = 1.0 / m as f64 - (dot(model_row(j), &mu[..p]) + mu[p + 1]);
    }

    let d_data: f64 = pi.iter().map(|&w| (w - 1.0 / n as f64) * (w - 1.0 / n as f64)).sum::<f64>() * 0.5;
    let d_model: f64 = psi.iter().map(|&w| (w - 1.0 / m as f64) * (w - 1.0 / m as f64)).sum::<f64>() * 0.5;

    // Residual of the matching constraint, for diagnostics.
    let mut resid = vec![0.0; p];
    for (i, &w) in pi.iter().enumerate() {
        for (r, v) in resid.iter_mut().zip(data_row(i)) {
            *r += w * v;
        }
    }
    for (j, &w) in psi.iter().enumerate() {
        for (r, v) in resid.iter_mut().zip(model_row(j)) {
            *r += w * v; // negated model rows: this subtracts psi_j m'_j
        }
    }

    Ok(TwoSampleSolution {
        status: SolveStatus::Converged,
        zero_count_model: count_zeros(&psi),
        zero_count_data: count_zeros(&pi),
        pi,
        psi,
        dual: mu,
        divergence_data_nats: d_data,
        divergence_data_bits: d_data / LN_2,
        divergence_model_nats: d_model,
        divergence_model_bits: d_model / LN_2,
        score_model: libm::exp(d_model),
        score_data: libm::exp(d_data),
        iterations: 0,
        final_grad_norm: norm2(&resid),
        size_mismatch_warning: stacked.size_mismatch(),
    })
}

/// Kernel two-sample test: per-side rows are witness-kernel evaluations
/// `[k(x_i, t_w)]_w` and `[k(y_j, t_w)]_w`, stacked and solved. The labeled
/// variant passes a product kernel, which requires labels on the samples
/// and the witnesses.
pub fn kgel2(
    data: &FeatureSet,
    model: &FeatureSet,
    witnesses: &WitnessSet,
    kernel: &KernelSpec,
    divergence: DivergenceKind,
    config: &SolverConfig,
) -> Result<TwoSampleSolution> {
    kernel.validate()?;
    if data.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: data.dim(), got: model.dim() });
    }
    if witnesses.dim() != data.dim() {
        return Err(Error::DimensionMismatch { expected: data.dim(), got: witnesses.dim() });
    }
    if kernel.uses_labels() {
        if data.labels().is_none() {
            return Err(Error::MissingLabels("data side of labeled test"));
        }
        if model.labels().is_none() {
            return Err(Error::MissingLabels("model side of labeled test"));
        }
        if witnesses.labels().is_none() {
            return Err(Error::MissingLabels("witnesses of labeled test"));
        }
    }

    let w = witnesses.len();
    let mut data_rows = Mat::zeros(data.len(), w);
    for i in 0..data.len() {
        let row = witness_row(kernel, data.sample(i), witnesses)?;
        data_rows.row_mut(i).copy_from_slice(&row);
    }
    let mut model_rows = Mat::zeros(model.len(), w);
    for j in 0..model.len() {
        let row = witness_row(kernel, model.sample(j), witnesses)?;
        model_rows.row_mut(j).copy_from_slice(&row);
    }
    let stacked = stack_two_sample(&data_rows, &model_rows)?;
    solve_two_sample(&stacked, divergence, config)
}
