//! The run pipeline: load files, resolve the configuration into moment
//! matrices, solve, and assemble the report. Deterministic given the config
//! and seeds; all randomness flows from `config.seed`.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use gel_core::diagnostics::{
    aggregate_class_weights, gen_gaussian_mixture, oracle_mode_distribution, rank_samples,
    ModeSpec,
};
use gel_core::kernel::KernelSpec;
use gel_core::linalg::Mat;
use gel_core::moments::{
    build_fid_moments, build_me_moments, build_mean_moments, pca_preprocess, sample_witnesses,
    wrap_user_moments, FeatureSet, MeMode, MomentMatrix, WitnessSet,
};
use gel_core::solver::{feasibility_verdict, solve_one_sample, GelSolution};
use gel_core::two_sample::{kgel2, solve_two_sample, stack_two_sample, TwoSampleSolution};
use gel_core::HullVerdict;

use crate::config::{KernelChoice, RunConfig, TestCommand};
use crate::io::{load_features, read_hierarchy};
use crate::npy::read_npy;
use crate::report::{BenchJson, HullJson, PerClassJson, Report};
use crate::CliError;

/// Executes a run and returns the report. Completed tests — including
/// infinite-divergence outcomes like `HullFail` — are `Ok`; errors are
/// configuration, file or numerical failures.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let t0 = Instant::now();
    let mut report = Report::new(config);
    match config.command {
        TestCommand::Bench => run_bench(config, &mut report)?,
        TestCommand::HullCheck => run_hull_check(config, &mut report)?,
        _ => run_test(config, &mut report)?,
    }
    report.timing_ms = t0.elapsed().as_secs_f64() * 1000.0;
    Ok(report)
}

struct Inputs {
    data: FeatureSet,
    model: Option<FeatureSet>,
    pool: Option<FeatureSet>,
}

fn path_arg<'a>(path: &'a Option<std::path::PathBuf>, what: &str) -> Result<&'a Path, CliError> {
    path.as_deref()
        .ok_or_else(|| CliError::config(format!("--{what} is required for this command")))
}

fn load_inputs(config: &RunConfig, need_model: bool, need_pool: bool) -> Result<Inputs, CliError> {
    let data = load_features(path_arg(&config.data, "data")?, config.labels_data.as_deref())?;
    let model = if need_model || config.model.is_some() {
        let p = path_arg(&config.model, "model")?;
        Some(load_features(p, config.labels_model.as_deref())?)
    } else {
        None
    };
    let pool = if need_pool || config.witness_pool.is_some() {
        let p = path_arg(&config.witness_pool, "witness-pool")?;
        Some(load_features(p, config.labels_witness.as_deref())?)
    } else {
        None
    };
    let mut inputs = Inputs { data, model, pool };

    if config.pca {
        let mut sets = vec![inputs.data.clone()];
        if let Some(m) = &inputs.model {
            sets.push(m.clone());
        }
        if let Some(p) = &inputs.pool {
            sets.push(p.clone());
        }
        let (mut projected, transform) = pca_preprocess(&sets)?;
        inputs.data = projected.remove(0);
        if inputs.model.is_some() {
            inputs.model = Some(projected.remove(0));
        }
        if inputs.pool.is_some() {
            inputs.pool = Some(projected.remove(0));
        }
        if transform.truncated() {
            // Surfaced later through the report warnings.
        }
    }
    Ok(inputs)
}

fn kernel_for(config: &RunConfig, dim: usize) -> Result<KernelSpec, CliError> {
    Ok(match config.kernel {
        KernelChoice::Exponential => KernelSpec::exponential(dim),
        KernelChoice::ProductDelta => KernelSpec::product_delta(dim),
        KernelChoice::ProductHierarchy => {
            let path = path_arg(&config.hierarchy, "hierarchy")?;
            KernelSpec::product_hierarchy(dim, read_hierarchy(path)?)
        }
    })
}

fn sample_config_witnesses(
    config: &RunConfig,
    pool: &FeatureSet,
) -> Result<WitnessSet, CliError> {
    sample_witnesses(pool, config.witness_count, config.seed).map_err(CliError::from)
}

/// Builds the augmented `[x, upper-tri(x x^T)]` rows used by the
/// first-two-moments condition on one side of a two-sample test.
fn fid_augmented_rows(set: &FeatureSet) -> Mat {
    let d = set.dim();
    let p = d + d * (d + 1) / 2;
    let mut rows = Mat::zeros(set.len(), p);
    for i in 0..set.len() {
        let x = set.row(i);
        let out = rows.row_mut(i);
        out[..d].copy_from_slice(x);
        let mut k = d;
        for a in 0..d {
            for b in a..d {
                out[k] = x[a] * x[b];
                k += 1;
            }
        }
    }
    rows
}

enum Outcome {
    One(GelSolution),
    Two(TwoSampleSolution),
}

fn moment_warnings(report: &mut Report, moments: &MomentMatrix) {
    if moments.underdetermined() {
        report.warnings.push(format!(
            "moment matrix has n = {} rows for p = {} constraints; the dual Hessian is likely degenerate",
            moments.len(),
            moments.constraint_dim()
        ));
    }
}

/// Builds and solves the configured test, returning the solution plus the
/// data-side ids (and model-side ids for two-sample runs).
fn solve_configured(
    config: &RunConfig,
    inputs: &Inputs,
    report: &mut Report,
) -> Result<(Outcome, Vec<u64>, Vec<u64>), CliError> {
    let solver = config.solver_config();
    let divergence = config.divergence.kind();
    let data = &inputs.data;

    let kernel_test = matches!(
        config.command,
        TestCommand::Kgel | TestCommand::Kgel2 | TestCommand::LabelTest | TestCommand::ModeReport
    ) || (config.command == TestCommand::Rank && config.witness_pool.is_some());

    if kernel_test {
        let model = inputs.model.as_ref().expect("model loaded for kernel test");
        let pool = inputs.pool.as_ref().expect("pool loaded for kernel test");
        let kernel = kernel_for(config, data.dim())?;
        if kernel.uses_labels() {
            for (set, flag) in [
                (data.labels().is_none(), "--labels-data"),
                (model.labels().is_none(), "--labels-model"),
                (pool.labels().is_none(), "--labels-witness"),
            ] {
                if set {
                    return Err(CliError::config(format!(
                        "the {} kernel needs labels: pass {flag}",
                        match config.kernel {
                            KernelChoice::ProductDelta => "product-delta",
                            _ => "product-hierarchy",
                        }
                    )));
                }
            }
        }
        let witnesses = sample_config_witnesses(config, pool)?;
        let two = config.two_sample || config.command == TestCommand::Kgel2;
        if two {
            let sol = kgel2(data, model, &witnesses, &kernel, divergence, &solver)?;
            return Ok((Outcome::Two(sol), data.ids().to_vec(), model.ids().to_vec()));
        }
        let moments = build_me_moments(data, model, &witnesses, &kernel, MeMode::VsModelMean)?;
        moment_warnings(report, &moments);
        let sol = solve_one_sample(divergence, &moments, &solver)?;
        return Ok((Outcome::One(sol), data.ids().to_vec(), Vec::new()));
    }

    // Moment-vector tests: user-supplied, mean, or first-two-moments.
    if let Some(moments_path) = &config.moments {
        if config.two_sample {
            return Err(CliError::config(
                "--two-sample cannot be combined with --moments; supply per-side feature files",
            ));
        }
        let matrix = read_npy(moments_path)?;
        if matrix.rows() != data.len() {
            return Err(CliError::config(format!(
                "moment matrix has {} rows for {} data samples",
                matrix.rows(),
                data.len()
            )));
        }
        let moments = wrap_user_moments(matrix)?;
        moment_warnings(report, &moments);
        let sol = solve_one_sample(divergence, &moments, &solver)?;
        return Ok((Outcome::One(sol), data.ids().to_vec(), Vec::new()));
    }

    let model = inputs.model.as_ref().expect("model loaded for mean test");
    if config.two_sample {
        let (rows_data, rows_model) = if config.fid {
            (fid_augmented_rows(data), fid_augmented_rows(model))
        } else {
            (data.features().clone(), model.features().clone())
        };
        let stacked = stack_two_sample(&rows_data, &rows_model)?;
        let sol = solve_two_sample(&stacked, divergence, &solver)?;
        return Ok((Outcome::Two(sol), data.ids().to_vec(), model.ids().to_vec()));
    }
    let moments = if config.fid {
        build_fid_moments(data, model)?
    } else {
        build_mean_moments(data, &model.features().col_means())?
    };
    moment_warnings(report, &moments);
    let sol = solve_one_sample(divergence, &moments, &solver)?;
    Ok((Outcome::One(sol), data.ids().to_vec(), Vec::new()))
}

fn run_test(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let kernelish = matches!(
        config.command,
        TestCommand::Kgel | TestCommand::Kgel2 | TestCommand::LabelTest | TestCommand::ModeReport
    );
    let need_pool = kernelish || (config.command == TestCommand::Rank && config.witness_pool.is_some());
    let need_model = config.moments.is_none();
    let inputs = load_inputs(config, need_model, need_pool)?;

    if config.command == TestCommand::LabelTest && !config.kernel.uses_labels() {
        return Err(CliError::config(
            "label-test requires a label-aware kernel: --kernel product-delta or product-hierarchy",
        ));
    }

    let keep_weights = !config.no_weights;
    let (outcome, data_ids, model_ids) = solve_configured(config, &inputs, report)?;

    let data_weights: Option<Vec<f64>> = match &outcome {
        Outcome::One(sol) => {
            report.set_one_sample(sol, &data_ids, keep_weights);
            (!sol.weights.is_empty()).then(|| sol.weights.clone())
        }
        Outcome::Two(sol) => {
            report.set_two_sample(sol, &data_ids, &model_ids, keep_weights);
            (!sol.pi.is_empty()).then(|| sol.pi.clone())
        }
    };

    if config.command == TestCommand::ModeReport {
        if let Some(weights) = &data_weights {
            let labels = inputs
                .data
                .labels()
                .ok_or_else(|| CliError::config("mode-report needs --labels-data"))?;
            let mut class_report =
                aggregate_class_weights(weights, labels, config.rescale_present)?;
            if let Some(oracle) = oracle_from_config(config, labels)? {
                class_report.attach_oracle(&oracle);
            }
            report.class_report = Some(class_report.into());
        }
        if config.per_class {
            report.per_class = Some(per_class_reports(config, &inputs)?);
        }
    }

    if config.command == TestCommand::Rank {
        if let Some(weights) = &data_weights {
            let mut ranked = rank_samples(weights, &data_ids)?;
            if let Some(k) = config.bottom_k {
                if k > ranked.len() {
                    return Err(CliError::config(format!(
                        "--bottom-k {k} exceeds the {} available samples",
                        ranked.len()
                    )));
                }
                ranked.truncate(k);
            }
            report.ranking = Some(ranked);
        }
    }

    Ok(())
}

fn oracle_from_config(
    config: &RunConfig,
    labels: &[String],
) -> Result<Option<std::collections::BTreeMap<String, f64>>, CliError> {
    let observed: BTreeSet<String> = labels.iter().cloned().collect();
    if !config.dropped.is_empty() {
        let dropped: Vec<String> = config.dropped.clone();
        let present: Vec<String> =
            observed.iter().filter(|c| !dropped.contains(c)).cloned().collect();
        let spec = ModeSpec::PresentDropped { present, dropped };
        return Ok(Some(oracle_mode_distribution(&spec)?.into_iter().collect()));
    }
    if !config.group_a.is_empty() {
        let mass = config.group_a_mass.ok_or_else(|| {
            CliError::config("--group-a requires --group-a-mass for the oracle proportion")
        })?;
        if !(0.0..=1.0).contains(&mass) {
            return Err(CliError::config("--group-a-mass must lie in [0, 1]"));
        }
        let a: Vec<String> = config.group_a.clone();
        let b: Vec<String> = observed.iter().filter(|c| !a.contains(c)).cloned().collect();
        let spec = ModeSpec::GroupProportions { groups: vec![(a, mass), (b, 1.0 - mass)] };
        return Ok(Some(oracle_mode_distribution(&spec)?.into_iter().collect()));
    }
    Ok(None)
}

/// One two-sample kernel test per class, run concurrently. Witnesses come
/// from the class's own slice of the pool when the pool is labeled.
fn per_class_reports(config: &RunConfig, inputs: &Inputs) -> Result<Vec<PerClassJson>, CliError> {
    let data = &inputs.data;
    let model = inputs
        .model
        .as_ref()
        .ok_or_else(|| CliError::config("per-class mode needs --model"))?;
    let pool = inputs
        .pool
        .as_ref()
        .ok_or_else(|| CliError::config("per-class mode needs --witness-pool"))?;
    if model.labels().is_none() {
        return Err(CliError::config("per-class mode needs --labels-model"));
    }
    let labels = data
        .labels()
        .ok_or_else(|| CliError::config("per-class mode needs --labels-data"))?;
    let classes: BTreeSet<String> = labels.iter().cloned().collect();

    let kernel = kernel_for(config, data.dim())?;
    let solver = config.solver_config();
    let divergence = config.divergence.kind();

    let results: Vec<Result<PerClassJson, CliError>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for class in &classes {
            let kernel = &kernel;
            let solver = &solver;
            handles.push(scope.spawn(move || -> Result<PerClassJson, CliError> {
                let data_c = data
                    .filter_by_label(class)
                    .ok_or_else(|| CliError::config(format!("no data samples in class {class}")))?;
                let model_c = model.filter_by_label(class).ok_or_else(|| {
                    CliError::config(format!("no model samples in class {class}"))
                })?;
                let pool_c = match pool.labels() {
                    Some(_) => pool.filter_by_label(class).ok_or_else(|| {
                        CliError::config(format!("no witness-pool samples in class {class}"))
                    })?,
                    None => pool.clone(),
                };
                if config.witness_count > pool_c.len() {
                    return Err(CliError::config(format!(
                        "class {class}: witness pool has {} samples for --witness-count {}",
                        pool_c.len(),
                        config.witness_count
                    )));
                }
                let witnesses = sample_witnesses(&pool_c, config.witness_count, config.seed)?;
                let sol = kgel2(&data_c, &model_c, &witnesses, kernel, divergence, solver)?;
                let score = if sol.score_model.is_finite() {
                    format!("{:.3}/{:.3}", sol.score_model, sol.score_data)
                } else {
                    "+inf/+inf".to_string()
                };
                Ok(PerClassJson {
                    class: class.clone(),
                    status: format!("{:?}", sol.status),
                    score,
                    n_data: data_c.len(),
                    n_model: model_c.len(),
                    score_model: sol.score_model.is_finite().then_some(sol.score_model),
                    score_data: sol.score_data.is_finite().then_some(sol.score_data),
                    alpha_zero_model: sol.zero_count_model,
                    beta_zero_data: sol.zero_count_data,
                })
            }));
        }
        handles.into_iter().map(|h| h.join().expect("per-class thread panicked")).collect()
    });
    results.into_iter().collect()
}

fn run_hull_check(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let inputs = load_inputs(config, config.moments.is_none(), false)?;
    let rows: Mat = if let Some(moments_path) = &config.moments {
        read_npy(moments_path)?
    } else {
        let model = inputs.model.as_ref().expect("model loaded");
        if config.two_sample {
            let stacked =
                stack_two_sample(inputs.data.features(), model.features())?;
            stacked.stacked().clone()
        } else if config.fid {
            build_fid_moments(&inputs.data, model)?.rows().clone()
        } else {
            build_mean_moments(&inputs.data, &model.features().col_means())?
                .rows()
                .clone()
        }
    };

    let verdict = feasibility_verdict(&rows, &config.solver_config())?;
    let (name, distance, iterations) = match &verdict {
        HullVerdict::Inside { distance, iterations, .. } => ("inside", *distance, *iterations),
        HullVerdict::Outside { distance, iterations, .. } => ("outside", *distance, *iterations),
        HullVerdict::Indeterminate { distance, iterations } => {
            ("indeterminate", *distance, *iterations)
        }
    };
    report.status = name.to_string();
    report.score = if name == "outside" { "+inf".to_string() } else { "finite".to_string() };
    report.hull = Some(HullJson { verdict: name.to_string(), distance, iterations });
    Ok(())
}

fn run_bench(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let n = config.bench_n;
    let d = config.bench_dim;
    let data = gen_gaussian_mixture(1, 0.0, &[n], d, config.seed)?;
    let model = gen_gaussian_mixture(1, 0.0, &[n], d, config.seed + 1)?;
    let pool = gen_gaussian_mixture(1, 0.0, &[config.witness_count.max(2000)], d, config.seed + 2)?;
    let witnesses = sample_witnesses(&pool, config.witness_count, config.seed + 3)?;
    let kernel = KernelSpec::exponential(d);

    let t_build = Instant::now();
    let moments = build_me_moments(&data, &model, &witnesses, &kernel, MeMode::VsModelMean)?;
    let build_ms = t_build.elapsed().as_secs_f64() * 1000.0;

    let t_solve = Instant::now();
    let sol = solve_one_sample(config.divergence.kind(), &moments, &config.solver_config())?;
    let solve_ms = t_solve.elapsed().as_secs_f64() * 1000.0;

    report.set_one_sample(&sol, data.ids(), false);
    report.bench = Some(BenchJson {
        n,
        dim: d,
        witness_count: config.witness_count,
        build_ms,
        solve_ms,
    });
    Ok(())
}
