//! # gel-core
//!
//! Generalized empirical likelihood (GEL) tests for diagnosing the mismatch
//! between a "model" sample and a "data" sample.
//!
//! A GEL test asks: how far must the empirical distribution of the data be
//! reweighted before a chosen moment condition holds? The answer is a
//! divergence score plus a weight per sample, and the weights are the
//! diagnostic: samples a model cannot represent receive (near-)zero weight,
//! over-represented regions receive inflated weight, and class-aggregated
//! weights recover which modes were dropped or imbalanced.
//!
//! ## Layout
//!
//! | Module | Provides |
//! |--------|----------|
//! | [`moments`] | Moment-condition matrices: mean, first+second moment, mean embedding |
//! | [`kernel`] | Exponential, delta-label, hierarchy-path and product kernels |
//! | [`solver`] | One-sample dual Newton solvers for the EL / ET / Euclidean objectives |
//! | [`two_sample`] | Two-sample (GEL2 / KGEL2) stacking and solving |
//! | [`hull`] | Convex-hull membership via the randomized triangle algorithm |
//! | [`diagnostics`] | Class mass aggregation, Hellinger scores, rankings, PR curves |
//! | [`linalg`] | Small row-major matrix type and the dense routines the solvers need |
//! | [`rng`] | Seeded, platform-independent random numbers |
//!
//! ## Quick start
//!
//! ```rust
//! use gel_core::linalg::Mat;
//! use gel_core::moments::{build_mean_moments, FeatureSet};
//! use gel_core::solver::{solve_et, SolverConfig};
//!
//! // Does the test sample have mean (0, 0)?
//! let test = FeatureSet::new(
//!     Mat::from_rows(&[vec![-1.0, 0.5], vec![1.0, -0.5], vec![0.5, 0.25]]).unwrap(),
//!     None,
//! )
//! .unwrap();
//! let moments = build_mean_moments(&test, &[0.0, 0.0]).unwrap();
//! let solution = solve_et(&moments, &SolverConfig::default()).unwrap();
//! assert!(solution.status.is_converged());
//! assert!((solution.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
//! ```
//!
//! The crate is `no_std` (with `alloc`); file formats, reports and the
//! command-line surface live in the companion `gel-cli` crate.
//!
//! ## References
//!
//! - Owen (2001). "Empirical Likelihood"
//! - Qin & Lawless (1994). "Empirical likelihood and general estimating equations"
//! - Chwialkowski et al. (2015). "Fast two-sample testing with analytic
//!   representations of probability measures"
//! - Kalantari (2015). "A characterization theorem and an algorithm for a
//!   convex hull membership problem"

#![no_std]
#![deny(unsafe_code)]
// `!(x > 0.0)` deliberately catches NaN alongside nonpositive values, and
// triangular index loops over packed symmetric matrices read better than
// iterator chains.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

use thiserror::Error;

pub mod diagnostics;
pub mod hull;
pub mod kernel;
pub mod linalg;
pub mod moments;
pub mod rng;
pub mod solver;
pub mod two_sample;

pub use diagnostics::{ClassReport, ModeSpec, PrCurve};
pub use hull::{hull_membership, HullVerdict};
pub use kernel::{eval_kernel, hierarchy_path_score, KernelSpec, LabelHierarchy, Sample};
pub use linalg::Mat;
pub use moments::{
    build_fid_moments, build_me_moments, build_mean_moments, pca_preprocess, sample_witnesses,
    wrap_user_moments, FeatureSet, MeMode, MomentMatrix, MomentProvenance, WitnessSet,
};
pub use solver::{
    modified_log, solve_el, solve_et, solve_euclidean, wilks_statistic, DivergenceKind,
    GelSolution, SolveStatus, SolverConfig,
};
pub use two_sample::{kgel2, solve_two_sample, stack_two_sample, TwoSampleMoments, TwoSampleSolution};

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("sample ids are not unique")]
    DuplicateIds,

    #[error("labels required but absent: {0}")]
    MissingLabels(&'static str),

    #[error("label {0} has no hierarchy path")]
    LabelNotInHierarchy(alloc::string::String),

    #[error("invalid kernel specification: {0}")]
    InvalidKernel(&'static str),

    #[error("witness count {count} exceeds pool size {pool}")]
    CountExceedsPool { count: usize, pool: usize },

    #[error("paired moments need equal sample counts: {test} vs {model}")]
    PairedSizeMismatch { test: usize, model: usize },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("dual Hessian is singular even after ridge regularization")]
    SingularHessian,

    #[error("mode specification drops every class")]
    AllClassesDropped,

    #[error("ground truth is degenerate: all flags identical")]
    DegenerateGroundTruth,

    #[error("cannot take bottom {k} of {n} samples")]
    BottomKTooLarge { k: usize, n: usize },

    #[error("{modes} modes do not fit in {dim} dimensions")]
    TooManyModes { modes: usize, dim: usize },
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
