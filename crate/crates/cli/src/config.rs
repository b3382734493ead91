//! Resolved run configuration. Every field is echoed verbatim into the
//! report so a run can be reproduced from its output alone.

use std::path::PathBuf;

use gel_core::solver::{DivergenceKind, SolverConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestCommand {
    MeanTest,
    Kgel,
    Kgel2,
    LabelTest,
    HullCheck,
    ModeReport,
    Rank,
    Bench,
}

impl TestCommand {
    pub fn as_str(self) -> &'static str {
        match self {
            TestCommand::MeanTest => "mean-test",
            TestCommand::Kgel => "kgel",
            TestCommand::Kgel2 => "kgel2",
            TestCommand::LabelTest => "label-test",
            TestCommand::HullCheck => "hull-check",
            TestCommand::ModeReport => "mode-report",
            TestCommand::Rank => "rank",
            TestCommand::Bench => "bench",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    #[default]
    Exponential,
    ProductDelta,
    ProductHierarchy,
}

impl KernelChoice {
    pub fn uses_labels(self) -> bool {
        !matches!(self, KernelChoice::Exponential)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DivergenceChoice {
    El,
    #[default]
    Et,
    Euclidean,
}

impl DivergenceChoice {
    pub fn kind(self) -> DivergenceKind {
        match self {
            DivergenceChoice::El => DivergenceKind::EmpiricalLikelihood,
            DivergenceChoice::Et => DivergenceKind::ExponentialTilting,
            DivergenceChoice::Euclidean => DivergenceKind::Euclidean,
        }
    }
}

/// Fully resolved configuration for one run; defaults already applied.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: TestCommand,
    pub data: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub witness_pool: Option<PathBuf>,
    pub witness_count: usize,
    pub moments: Option<PathBuf>,
    pub labels_data: Option<PathBuf>,
    pub labels_model: Option<PathBuf>,
    pub labels_witness: Option<PathBuf>,
    pub hierarchy: Option<PathBuf>,
    pub kernel: KernelChoice,
    pub divergence: DivergenceChoice,
    pub two_sample: bool,
    pub fid: bool,
    pub pca: bool,
    pub seed: u64,
    pub tol: f64,
    pub max_iters: usize,
    pub no_weights: bool,
    pub out: Option<PathBuf>,
    pub rescale_present: Option<usize>,
    pub dropped: Vec<String>,
    pub group_a: Vec<String>,
    pub group_a_mass: Option<f64>,
    pub per_class: bool,
    pub bottom_k: Option<usize>,
    pub bench_n: usize,
    pub bench_dim: usize,
}

impl RunConfig {
    pub fn new(command: TestCommand) -> Self {
        RunConfig {
            command,
            data: None,
            model: None,
            witness_pool: None,
            witness_count: 64,
            moments: None,
            labels_data: None,
            labels_model: None,
            labels_witness: None,
            hierarchy: None,
            kernel: KernelChoice::default(),
            divergence: DivergenceChoice::default(),
            two_sample: false,
            fid: false,
            pca: false,
            seed: 0,
            tol: 1e-8,
            max_iters: 200,
            no_weights: false,
            out: None,
            rescale_present: None,
            dropped: Vec::new(),
            group_a: Vec::new(),
            group_a_mass: None,
            per_class: false,
            bottom_k: None,
            bench_n: 10_000,
            bench_dim: 16,
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            grad_tolerance: self.tol,
            max_iterations: self.max_iters,
            rng_seed: self.seed,
            ..SolverConfig::default()
        }
    }
}
