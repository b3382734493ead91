//! Moment-condition construction.
//!
//! Every test in this crate reduces to the same shape: a matrix whose row
//! `i` is `m(x_i; c)`, a function of test sample `i` whose expectation is
//! zero exactly when the data and model agree on the property under test.
//! The builders here produce that matrix for:
//!
//! - the mean condition `x - c`,
//! - the first-plus-second-moment condition (mean and covariance match),
//! - mean-embedding conditions `k(x, t_w)` at a set of witness points,
//!   either against the model-side embedding mean or paired sample-by-sample,
//! - arbitrary user-supplied moment matrices.
//!
//! Downstream solvers consume [`MomentMatrix`] uniformly and never see where
//! the rows came from.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::kernel::{eval_kernel, KernelSpec, Sample};
use crate::linalg::{jacobi_eigh, Mat};
use crate::rng::Rng;
use crate::{Error, Result};

/// A set of samples: an `n x d` feature matrix with optional per-sample
/// labels and stable ids.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    features: Mat,
    labels: Option<Vec<String>>,
    ids: Vec<u64>,
}

impl FeatureSet {
    /// Validates shape, finiteness and label length; ids default to row order.
    pub fn new(features: Mat, labels: Option<Vec<String>>) -> Result<Self> {
        let ids = (0..features.rows() as u64).collect();
        Self::with_ids(features, labels, ids)
    }

    /// As [`FeatureSet::new`] but with caller-provided unique ids.
    pub fn with_ids(features: Mat, labels: Option<Vec<String>>, ids: Vec<u64>) -> Result<Self> {
        if features.rows() == 0 {
            return Err(Error::Empty("feature set"));
        }
        if features.cols() == 0 {
            return Err(Error::Empty("feature dimension"));
        }
        if let Some((row, col)) = features.first_non_finite() {
            return Err(Error::NonFinite { row, col });
        }
        if let Some(l) = &labels {
            if l.len() != features.rows() {
                return Err(Error::LengthMismatch { expected: features.rows(), got: l.len() });
            }
        }
        if ids.len() != features.rows() {
            return Err(Error::LengthMismatch { expected: features.rows(), got: ids.len() });
        }
        let distinct: BTreeSet<u64> = ids.iter().copied().collect();
        if distinct.len() != ids.len() {
            return Err(Error::DuplicateIds);
        }
        Ok(FeatureSet { features, labels, ids })
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        false // an empty set cannot be constructed
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Mat {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.features.row(i)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[i].as_str())
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    /// Borrow sample `i` for kernel evaluation.
    pub fn sample(&self, i: usize) -> Sample<'_> {
        Sample::new(self.features.row(i), self.label(i))
    }

    /// The subset with the given label, preserving ids. `None` when no
    /// sample carries the label.
    pub fn filter_by_label(&self, label: &str) -> Option<FeatureSet> {
        let labels = self.labels.as_ref()?;
        let keep: Vec<usize> =
            (0..self.len()).filter(|&i| labels[i] == label).collect();
        if keep.is_empty() {
            return None;
        }
        let mut m = Mat::zeros(keep.len(), self.dim());
        for (r, &i) in keep.iter().enumerate() {
            m.row_mut(r).copy_from_slice(self.row(i));
        }
        let sub_labels: Vec<String> = keep.iter().map(|&i| labels[i].clone()).collect();
        let sub_ids: Vec<u64> = keep.iter().map(|&i| self.ids[i]).collect();
        Some(FeatureSet { features: m, labels: Some(sub_labels), ids: sub_ids })
    }
}

/// Witness points for mean-embedding conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSet {
    points: Mat,
    labels: Option<Vec<String>>,
    source_seed: u64,
}

impl WitnessSet {
    pub fn new(points: Mat, labels: Option<Vec<String>>, source_seed: u64) -> Result<Self> {
        if points.rows() == 0 {
            return Err(Error::Empty("witness set"));
        }
        if let Some((row, col)) = points.first_non_finite() {
            return Err(Error::NonFinite { row, col });
        }
        if let Some(l) = &labels {
            if l.len() != points.rows() {
                return Err(Error::LengthMismatch { expected: points.rows(), got: l.len() });
            }
        }
        Ok(WitnessSet { points, labels, source_seed })
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    pub fn points(&self) -> &Mat {
        &self.points
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn source_seed(&self) -> u64 {
        self.source_seed
    }

    pub fn sample(&self, w: usize) -> Sample<'_> {
        Sample::new(self.points.row(w), self.labels.as_ref().map(|l| l[w].as_str()))
    }
}

/// How a moment matrix was formed.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentProvenance {
    /// Rows are `x_i - c` for a fixed target mean `c`.
    MeanTarget,
    /// Rows are augmented `[x, upper-tri(x x^T)]` features minus the
    /// model-side augmented mean.
    FirstTwoMoments,
    /// Rows are witness-kernel evaluations minus the model-side embedding.
    MeanEmbedding { mode: MeMode, witnesses: usize },
    /// Caller-supplied rows, passed through unchanged.
    UserSupplied,
}

/// Pairing convention for mean-embedding moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeMode {
    /// Row `i` is `[k(x_i, t_w) - k(y_i, t_w)]_w`; requires equal sample
    /// counts and pairs strictly by index.
    Paired,
    /// Row `i` is `[k(x_i, t_w)]_w` minus the model-side empirical mean
    /// embedding at each witness.
    VsModelMean,
}

/// An `n x p` matrix whose row `i` is `m(x_i; c)`, plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    rows: Mat,
    provenance: MomentProvenance,
    target_c: Option<Vec<f64>>,
}

impl MomentMatrix {
    pub fn new(rows: Mat, provenance: MomentProvenance, target_c: Option<Vec<f64>>) -> Result<Self> {
        if rows.rows() == 0 {
            return Err(Error::Empty("moment matrix"));
        }
        if rows.cols() == 0 {
            return Err(Error::Empty("constraint dimension"));
        }
        if let Some((row, col)) = rows.first_non_finite() {
            return Err(Error::NonFinite { row, col });
        }
        Ok(MomentMatrix { rows, provenance, target_c })
    }

    pub fn len(&self) -> usize {
        self.rows.rows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Constraint dimension `p`.
    pub fn constraint_dim(&self) -> usize {
        self.rows.cols()
    }

    pub fn rows(&self) -> &Mat {
        &self.rows
    }

    pub fn provenance(&self) -> &MomentProvenance {
        &self.provenance
    }

    pub fn target_c(&self) -> Option<&[f64]> {
        self.target_c.as_deref()
    }

    /// True when `n < p + 1`, in which case the dual Hessian is likely
    /// degenerate and results deserve suspicion.
    pub fn underdetermined(&self) -> bool {
        self.len() < self.constraint_dim() + 1
    }
}

/// Mean condition: row `i` is `features_i - model_mean`.
pub fn build_mean_moments(test: &FeatureSet, model_mean: &[f64]) -> Result<MomentMatrix> {
    if model_mean.len() != test.dim() {
        return Err(Error::DimensionMismatch { expected: test.dim(), got: model_mean.len() });
    }
    let mut rows = Mat::zeros(test.len(), test.dim());
    for i in 0..test.len() {
        for (out, (x, c)) in rows.row_mut(i).iter_mut().zip(test.row(i).iter().zip(model_mean)) {
            *out = x - c;
        }
    }
    MomentMatrix::new(rows, MomentProvenance::MeanTarget, Some(model_mean.to_vec()))
}

/// Appends the upper triangle (with diagonal) of `x x^T` to `x`.
fn augment_first_two(x: &[f64], out: &mut [f64]) {
    let d = x.len();
    out[..d].copy_from_slice(x);
    let mut k = d;
    for i in 0..d {
        for j in i..d {
            out[k] = x[i] * x[j];
            k += 1;
        }
    }
}

/// First-plus-second-moment condition. The augmented feature of each point
/// is `[x, upper-tri(x x^T)]`, so `p = d + d(d+1)/2`; the target is the
/// model-side mean of the augmented feature. Only the upper triangle of the
/// second-moment block is kept — duplicating symmetric entries would make
/// the dual Hessian singular.
pub fn build_fid_moments(test: &FeatureSet, model: &FeatureSet) -> Result<MomentMatrix> {
    if model.dim() != test.dim() {
        return Err(Error::DimensionMismatch { expected: test.dim(), got: model.dim() });
    }
    let d = test.dim();
    let p = d + d * (d + 1) / 2;

    let mut c = vec![0.0; p];
    let mut aug = vec![0.0; p];
    for j in 0..model.len() {
        augment_first_two(model.row(j), &mut aug);
        for (acc, v) in c.iter_mut().zip(&aug) {
            *acc += v;
        }
    }
    let inv = 1.0 / model.len() as f64;
    for v in &mut c {
        *v *= inv;
    }

    let mut rows = Mat::zeros(test.len(), p);
    for i in 0..test.len() {
        augment_first_two(test.row(i), &mut aug);
        for (out, (a, cv)) in rows.row_mut(i).iter_mut().zip(aug.iter().zip(&c)) {
            *out = a - cv;
        }
    }
    MomentMatrix::new(rows, MomentProvenance::FirstTwoMoments, Some(c))
}

/// Evaluates `[k(sample, t_w)]_w` across all witnesses.
pub fn witness_row(kernel: &KernelSpec, sample: Sample<'_>, witnesses: &WitnessSet) -> Result<Vec<f64>> {
    (0..witnesses.len())
        .map(|w| eval_kernel(kernel, sample, witnesses.sample(w)))
        .collect()
}

/// Mean-embedding condition at the given witnesses; see [`MeMode`] for the
/// two pairing conventions. `p` equals the witness count.
pub fn build_me_moments(
    test: &FeatureSet,
    model: &FeatureSet,
    witnesses: &WitnessSet,
    kernel: &KernelSpec,
    mode: MeMode,
) -> Result<MomentMatrix> {
    kernel.validate()?;
    if test.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: test.dim(), got: model.dim() });
    }
    if witnesses.dim() != test.dim() {
        return Err(Error::DimensionMismatch { expected: test.dim(), got: witnesses.dim() });
    }
    let w_count = witnesses.len();

    match mode {
        MeMode::Paired => {
            if test.len() != model.len() {
                return Err(Error::PairedSizeMismatch { test: test.len(), model: model.len() });
            }
            let mut rows = Mat::zeros(test.len(), w_count);
            for i in 0..test.len() {
                let kx = witness_row(kernel, test.sample(i), witnesses)?;
                let ky = witness_row(kernel, model.sample(i), witnesses)?;
                for (out, (a, b)) in rows.row_mut(i).iter_mut().zip(kx.iter().zip(&ky)) {
                    *out = a - b;
                }
            }
            MomentMatrix::new(
                rows,
                MomentProvenance::MeanEmbedding { mode, witnesses: w_count },
                None,
            )
        }
        MeMode::VsModelMean => {
            let mut c = vec![0.0; w_count];
            for j in 0..model.len() {
                let ky = witness_row(kernel, model.sample(j), witnesses)?;
                for (acc, v) in c.iter_mut().zip(&ky) {
                    *acc += v;
                }
            }
            let inv = 1.0 / model.len() as f64;
            for v in &mut c {
                *v *= inv;
            }
            let mut rows = Mat::zeros(test.len(), w_count);
            for i in 0..test.len() {
                let kx = witness_row(kernel, test.sample(i), witnesses)?;
                for (out, (a, cv)) in rows.row_mut(i).iter_mut().zip(kx.iter().zip(&c)) {
                    *out = a - cv;
                }
            }
            MomentMatrix::new(
                rows,
                MomentProvenance::MeanEmbedding { mode, witnesses: w_count },
                Some(c),
            )
        }
    }
}

/// Wraps a caller-supplied moment matrix unchanged. This is the escape hatch
/// for conditions the built-ins do not cover, e.g. score-function moments
/// computed outside this crate.
pub fn wrap_user_moments(matrix: Mat) -> Result<MomentMatrix> {
    MomentMatrix::new(matrix, MomentProvenance::UserSupplied, None)
}

/// Draws `count` witness points from `pool` without replacement,
/// deterministically in `seed`. Labels are carried over when present.
pub fn sample_witnesses(pool: &FeatureSet, count: usize, seed: u64) -> Result<WitnessSet> {
    if count == 0 {
        return Err(Error::Empty("witness count"));
    }
    if count > pool.len() {
        return Err(Error::CountExceedsPool { count, pool: pool.len() });
    }
    let mut rng = Rng::seed_from_u64(seed);
    let picks = rng.sample_indices(pool.len(), count);
    let mut points = Mat::zeros(count, pool.dim());
    for (r, &i) in picks.iter().enumerate() {
        points.row_mut(r).copy_from_slice(pool.row(i));
    }
    let labels = pool
        .labels()
        .map(|l| picks.iter().map(|&i| l[i].clone()).collect::<Vec<_>>());
    WitnessSet::new(points, labels, seed)
}

/// A fitted centering-plus-rotation, reusable on further sets.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaTransform {
    mean: Vec<f64>,
    /// Component directions as rows, orthonormal, strongest first.
    components: Mat,
    /// Singular values of the centered data matrix, one per kept component.
    singular_values: Vec<f64>,
    /// True when rank deficiency forced dropping directions.
    truncated: bool,
}

impl PcaTransform {
    pub fn output_dim(&self) -> usize {
        self.components.rows()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn components(&self) -> &Mat {
        &self.components
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Projects a single vector.
    pub fn apply_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.mean.len() {
            return Err(Error::DimensionMismatch { expected: self.mean.len(), got: x.len() });
        }
        let centered: Vec<f64> = x.iter().zip(&self.mean).map(|(v, m)| v - m).collect();
        Ok(self.components.matvec(&centered))
    }

    /// Projects every sample of a set, keeping labels and ids.
    pub fn apply(&self, set: &FeatureSet) -> Result<FeatureSet> {
        let mut out = Mat::zeros(set.len(), self.output_dim());
        for i in 0..set.len() {
            let y = self.apply_vec(set.row(i))?;
            out.row_mut(i).copy_from_slice(&y);
        }
        FeatureSet::with_ids(out, set.labels().map(<[String]>::to_vec), set.ids().to_vec())
    }
}

/// Relative singular-value cutoff for dropping directions: a component is
/// kept only while its singular value exceeds `1e-6` of the largest.
pub const PCA_SINGULAR_VALUE_RTOL: f64 = 1e-6;

/// Fits a full-rank PCA (centering plus orthonormal rotation) on the
/// concatenation of all sets and applies it to each.
///
/// Solutions of the tests in this crate are invariant under full-rank affine
/// maps of the features, so this changes nothing statistically; it improves
/// dual conditioning. If the pooled covariance is rank deficient, directions
/// below [`PCA_SINGULAR_VALUE_RTOL`] are dropped and the transform is marked
/// [`PcaTransform::truncated`].
pub fn pca_preprocess(sets: &[FeatureSet]) -> Result<(Vec<FeatureSet>, PcaTransform)> {
    if sets.is_empty() {
        return Err(Error::Empty("feature sets"));
    }
    let d = sets[0].dim();
    for s in sets {
        if s.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: s.dim() });
        }
    }
    let total: usize = sets.iter().map(FeatureSet::len).sum();

    let mut mean = vec![0.0; d];
    for s in sets {
        for i in 0..s.len() {
            for (m, v) in mean.iter_mut().zip(s.row(i)) {
                *m += v;
            }
        }
    }
    for m in &mut mean {
        *m /= total as f64;
    }

    // Pooled covariance (n-1 denominator when possible).
    let mut cov = Mat::zeros(d, d);
    let mut centered = vec![0.0; d];
    for s in sets {
        for i in 0..s.len() {
            for (c, (v, m)) in centered.iter_mut().zip(s.row(i).iter().zip(&mean)) {
                *c = v - m;
            }
            for a in 0..d {
                let ca = centered[a];
                if ca == 0.0 {
                    continue;
                }
                for b in a..d {
                    let v = cov.get(a, b) + ca * centered[b];
                    cov.set(a, b, v);
                }
            }
        }
    }
    let denom = if total > 1 { (total - 1) as f64 } else { 1.0 };
    for a in 0..d {
        for b in a..d {
            let v = cov.get(a, b) / denom;
            cov.set(a, b, v);
            cov.set(b, a, v);
        }
    }

    let (eigenvalues, vectors) = jacobi_eigh(&cov);
    let sigma_max = libm::sqrt(eigenvalues[0].max(0.0));
    let mut kept = 0;
    let mut singular_values = Vec::new();
    for &ev in &eigenvalues {
        let sigma = libm::sqrt(ev.max(0.0));
        if kept == 0 || sigma > PCA_SINGULAR_VALUE_RTOL * sigma_max {
            singular_values.push(sigma);
            kept += 1;
        } else {
            break;
        }
    }
    let mut components = Mat::zeros(kept, d);
    for r in 0..kept {
        components.row_mut(r).copy_from_slice(vectors.row(r));
    }
    let transform = PcaTransform {
        mean,
        components,
        singular_values,
        truncated: kept < d,
    };
    let mut out = Vec::with_capacity(sets.len());
    for s in sets {
        out.push(transform.apply(s)?);
    }
    Ok((out, transform))
}
