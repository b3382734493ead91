//! `gel` — distribution tests with per-sample diagnostics.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gel_cli::config::{DivergenceChoice, KernelChoice, RunConfig, TestCommand};

#[derive(Parser)]
#[command(
    name = "gel",
    version,
    about = "Generalized empirical likelihood tests: score a model sample against a data sample and see which samples carry the mismatch"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Exponential,
    ProductDelta,
    ProductHierarchy,
}

#[derive(Clone, Copy, ValueEnum)]
enum DivergenceArg {
    El,
    Et,
    Euclidean,
}

#[derive(Args)]
struct TestOpts {
    /// Data-side feature matrix (.npy or .csv)
    #[arg(long)]
    data: PathBuf,

    /// Model-side feature matrix (.npy or .csv)
    #[arg(long)]
    model: Option<PathBuf>,

    /// Pool to draw witness points from (.npy or .csv)
    #[arg(long)]
    witness_pool: Option<PathBuf>,

    /// Number of witness points to draw from the pool
    #[arg(long, default_value_t = 64)]
    witness_count: usize,

    /// User-supplied moment matrix (.npy), one row per data sample
    #[arg(long)]
    moments: Option<PathBuf>,

    /// Labels for the data samples, one per line
    #[arg(long)]
    labels_data: Option<PathBuf>,

    /// Labels for the model samples, one per line
    #[arg(long)]
    labels_model: Option<PathBuf>,

    /// Labels for the witness pool, one per line
    #[arg(long)]
    labels_witness: Option<PathBuf>,

    /// Label hierarchy JSON: {"label": ["root", ..., "label"], ...}
    #[arg(long)]
    hierarchy: Option<PathBuf>,

    /// Kernel for mean-embedding tests
    #[arg(long, value_enum, default_value = "exponential")]
    kernel: KernelArg,

    /// GEL divergence
    #[arg(long, value_enum, default_value = "et")]
    divergence: DivergenceArg,

    /// Weight both sides (two-sample test)
    #[arg(long)]
    two_sample: bool,

    /// Match the first two moments instead of the mean
    #[arg(long)]
    fid: bool,

    /// Center and rotate features (full-rank PCA) before the test
    #[arg(long)]
    pca: bool,

    /// Seed for witness sampling and hull pivoting
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Solver gradient tolerance
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    /// Newton iteration cap
    #[arg(long, default_value_t = 200)]
    max_iters: usize,

    /// Omit per-sample weights from the report
    #[arg(long)]
    no_weights: bool,

    /// Write the JSON report here (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Rescale class masses by this present-class count in mode reports
    #[arg(long)]
    rescale_present: Option<usize>,

    /// Oracle: comma-separated class ids dropped from the model
    #[arg(long, value_delimiter = ',')]
    dropped: Vec<String>,

    /// Oracle: comma-separated class ids of group A
    #[arg(long, value_delimiter = ',')]
    group_a: Vec<String>,

    /// Oracle: total probability mass of group A
    #[arg(long)]
    group_a_mass: Option<f64>,

    /// Run one two-sample kernel test per class (mode-report)
    #[arg(long)]
    per_class: bool,

    /// Keep only the k lowest-weight samples in the ranking
    #[arg(long)]
    bottom_k: Option<usize>,
}

#[derive(Args)]
struct BenchOpts {
    /// Synthetic sample count per side
    #[arg(long, default_value_t = 10_000)]
    n: usize,

    /// Synthetic feature dimension
    #[arg(long, default_value_t = 16)]
    dim: usize,

    /// Number of witness points
    #[arg(long, default_value_t = 256)]
    witness_count: usize,

    /// GEL divergence
    #[arg(long, value_enum, default_value = "et")]
    divergence: DivergenceArg,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    #[arg(long, default_value_t = 200)]
    max_iters: usize,

    /// Write the JSON report here (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// One-sample moment test: mean (default), first two moments (--fid),
    /// or a user-supplied moment matrix (--moments)
    MeanTest(TestOpts),
    /// Kernel mean-embedding test at witness points (one-sample)
    Kgel(TestOpts),
    /// Two-sample kernel mean-embedding test: weights on both sides
    Kgel2(TestOpts),
    /// Labeled kernel test with a product (image x label) kernel
    LabelTest(TestOpts),
    /// Decide whether the moment target is inside the convex hull
    HullCheck(TestOpts),
    /// Aggregate weights per class, score against an oracle, optionally
    /// run one test per class
    ModeReport(TestOpts),
    /// Rank samples by ascending weight
    Rank(TestOpts),
    /// Time a synthetic kernel test
    Bench(BenchOpts),
}

fn divergence_choice(arg: DivergenceArg) -> DivergenceChoice {
    match arg {
        DivergenceArg::El => DivergenceChoice::El,
        DivergenceArg::Et => DivergenceChoice::Et,
        DivergenceArg::Euclidean => DivergenceChoice::Euclidean,
    }
}

fn resolve(opts: TestOpts, command: TestCommand) -> RunConfig {
    let mut c = RunConfig::new(command);
    c.data = Some(opts.data);
    c.model = opts.model;
    c.witness_pool = opts.witness_pool;
    c.witness_count = opts.witness_count;
    c.moments = opts.moments;
    c.labels_data = opts.labels_data;
    c.labels_model = opts.labels_model;
    c.labels_witness = opts.labels_witness;
    c.hierarchy = opts.hierarchy;
    c.kernel = match opts.kernel {
        KernelArg::Exponential => KernelChoice::Exponential,
        KernelArg::ProductDelta => KernelChoice::ProductDelta,
        KernelArg::ProductHierarchy => KernelChoice::ProductHierarchy,
    };
    c.divergence = divergence_choice(opts.divergence);
    c.two_sample = opts.two_sample || command == TestCommand::Kgel2;
    c.fid = opts.fid;
    c.pca = opts.pca;
    c.seed = opts.seed;
    c.tol = opts.tol;
    c.max_iters = opts.max_iters;
    c.no_weights = opts.no_weights;
    c.out = opts.out;
    c.rescale_present = opts.rescale_present;
    c.dropped = opts.dropped;
    c.group_a = opts.group_a;
    c.group_a_mass = opts.group_a_mass;
    c.per_class = opts.per_class;
    c.bottom_k = opts.bottom_k;

    // The labeled test defaults to the delta label kernel; a hierarchy file
    // upgrades it to the path kernel.
    if command == TestCommand::LabelTest && c.kernel == KernelChoice::Exponential {
        c.kernel = if c.hierarchy.is_some() {
            KernelChoice::ProductHierarchy
        } else {
            KernelChoice::ProductDelta
        };
    }
    c
}

fn resolve_bench(opts: BenchOpts) -> RunConfig {
    let mut c = RunConfig::new(TestCommand::Bench);
    c.bench_n = opts.n;
    c.bench_dim = opts.dim;
    c.witness_count = opts.witness_count;
    c.divergence = divergence_choice(opts.divergence);
    c.seed = opts.seed;
    c.tol = opts.tol;
    c.max_iters = opts.max_iters;
    c.out = opts.out;
    c
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match cli.command {
        Cmd::MeanTest(o) => resolve(o, TestCommand::MeanTest),
        Cmd::Kgel(o) => resolve(o, TestCommand::Kgel),
        Cmd::Kgel2(o) => resolve(o, TestCommand::Kgel2),
        Cmd::LabelTest(o) => resolve(o, TestCommand::LabelTest),
        Cmd::HullCheck(o) => resolve(o, TestCommand::HullCheck),
        Cmd::ModeReport(o) => resolve(o, TestCommand::ModeReport),
        Cmd::Rank(o) => resolve(o, TestCommand::Rank),
        Cmd::Bench(o) => resolve_bench(o),
    };

    match gel_cli::run(&config) {
        Ok(report) => {
            let json = report.to_json();
            if let Some(path) = &config.out {
                if let Err(e) = fs::write(path, &json) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
                println!("{} -> {}", report.summary(), path.display());
            } else {
                print!("{json}");
                eprintln!("{}", report.summary());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
