//! The JSON report schema.
//!
//! Two invariants shape it: a report plus its config echo must suffice to
//! re-run a test exactly, and identical configs with identical seeds must
//! produce byte-identical files once the `timing_ms` field is cleared.
//! Divergences and scores that are mathematically infinite serialize as
//! `null` in the numeric fields; the `score` display string carries
//! `"+inf"`.

use gel_core::diagnostics::ClassReport;
use gel_core::solver::{GelSolution, SolveStatus};
use gel_core::two_sample::TwoSampleSolution;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn status_str(status: SolveStatus) -> String {
    match status {
        SolveStatus::Converged => "Converged",
        SolveStatus::HullFail => "HullFail",
        SolveStatus::DivergedInfinite => "DivergedInfinite",
        SolveStatus::MaxIterations => "MaxIterations",
    }
    .to_string()
}

fn score_display(score: f64) -> String {
    if score.is_finite() {
        format!("{score:.3}")
    } else {
        "+inf".to_string()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WeightsJson {
    pub ids: Vec<u64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct ClassReportJson {
    pub class_mass: std::collections::BTreeMap<String, f64>,
    pub rescaled: std::collections::BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<std::collections::BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hellinger_to_oracle: Option<f64>,
}

impl From<ClassReport> for ClassReportJson {
    fn from(r: ClassReport) -> Self {
        ClassReportJson {
            class_mass: r.class_mass.into_iter().collect(),
            rescaled: r.rescaled.into_iter().collect(),
            oracle: r.oracle.map(|o| o.into_iter().collect()),
            hellinger_to_oracle: r.hellinger_to_oracle,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HullJson {
    pub verdict: String,
    pub distance: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BenchJson {
    pub n: usize,
    pub dim: usize,
    pub witness_count: usize,
    pub build_ms: f64,
    pub solve_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PerClassJson {
    pub class: String,
    pub status: String,
    pub score: String,
    pub n_data: usize,
    pub n_model: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score_model: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score_data: Option<f64>,
    pub alpha_zero_model: usize,
    pub beta_zero_data: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub config: RunConfig,
    pub seed: u64,
    pub status: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
    /// Display score: `"1.234"`, or `"model/test"` as `"1.150/1.166"` for
    /// two-sample runs, or `"+inf"`.
    pub score: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score_model: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score_data: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence_nats: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence_bits: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence_model_nats: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence_model_bits: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence_data_nats: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence_data_bits: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wilks: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hotelling_t2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hessian_rank: Option<usize>,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_grad_norm: Option<f64>,
    /// Model-side samples reported at exactly zero weight.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_zero_model: Option<usize>,
    /// Data-side samples reported at exactly zero weight.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_zero_data: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_report: Option<ClassReportJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<(u64, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights_data: Option<WeightsJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights_model: Option<WeightsJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_class: Option<Vec<PerClassJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hull: Option<HullJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bench: Option<BenchJson>,
    pub timing_ms: f64,
}

impl Report {
    pub fn new(config: &RunConfig) -> Self {
        Report {
            tool: format!("gel {}", env!("CARGO_PKG_VERSION")),
            config: config.clone(),
            seed: config.seed,
            status: String::new(),
            warnings: Vec::new(),
            score: String::new(),
            score_value: None,
            score_model: None,
            score_data: None,
            divergence_nats: None,
            divergence_bits: None,
            divergence_model_nats: None,
            divergence_model_bits: None,
            divergence_data_nats: None,
            divergence_data_bits: None,
            wilks: None,
            hotelling_t2: None,
            hessian_rank: None,
            iterations: 0,
            final_grad_norm: None,
            alpha_zero_model: None,
            beta_zero_data: None,
            class_report: None,
            ranking: None,
            weights_data: None,
            weights_model: None,
            per_class: None,
            hull: None,
            bench: None,
            timing_ms: 0.0,
        }
    }

    /// Fills in the one-sample solution fields.
    pub fn set_one_sample(&mut self, sol: &GelSolution, ids: &[u64], keep_weights: bool) {
        self.status = status_str(sol.status);
        self.score = score_display(sol.score);
        self.score_value = finite(sol.score);
        self.divergence_nats = finite(sol.divergence_nats);
        self.divergence_bits = finite(sol.divergence_bits);
        self.wilks = finite(sol.wilks);
        self.hotelling_t2 = sol.hotelling_t2;
        self.hessian_rank = sol.hessian_rank;
        self.iterations = sol.iterations;
        self.final_grad_norm = finite(sol.final_grad_norm);
        if !sol.weights.is_empty() {
            self.beta_zero_data = Some(
                sol.weights
                    .iter()
                    .filter(|&&w| w <= gel_core::solver::ZERO_WEIGHT_CUTOFF)
                    .count(),
            );
            if keep_weights {
                self.weights_data = Some(WeightsJson {
                    ids: ids.to_vec(),
                    weights: sol.weights.clone(),
                });
            }
        }
    }

    /// Fills in the two-sample solution fields; model score prints first.
    pub fn set_two_sample(
        &mut self,
        sol: &TwoSampleSolution,
        data_ids: &[u64],
        model_ids: &[u64],
        keep_weights: bool,
    ) {
        self.status = status_str(sol.status);
        self.score = format!(
            "{}/{}",
            score_display(sol.score_model),
            score_display(sol.score_data)
        );
        self.score_model = finite(sol.score_model);
        self.score_data = finite(sol.score_data);
        self.divergence_model_nats = finite(sol.divergence_model_nats);
        self.divergence_model_bits = finite(sol.divergence_model_bits);
        self.divergence_data_nats = finite(sol.divergence_data_nats);
        self.divergence_data_bits = finite(sol.divergence_data_bits);
        self.iterations = sol.iterations;
        self.final_grad_norm = finite(sol.final_grad_norm);
        if sol.size_mismatch_warning {
            self.warnings.push(
                "data and model sample counts differ; per-side divergences carry O(1/n) bias and compare imperfectly".to_string(),
            );
        }
        if !sol.pi.is_empty() {
            self.alpha_zero_model = Some(sol.zero_count_model);
            self.beta_zero_data = Some(sol.zero_count_data);
            if keep_weights {
                self.weights_data = Some(WeightsJson {
                    ids: data_ids.to_vec(),
                    weights: sol.pi.clone(),
                });
                self.weights_model = Some(WeightsJson {
                    ids: model_ids.to_vec(),
                    weights: sol.psi.clone(),
                });
            }
        }
    }

    /// One-line human summary for standard output.
    pub fn summary(&self) -> String {
        format!(
            "{}: status={} score={} seed={} ({:.1} ms)",
            self.config.command.as_str(),
            self.status,
            self.score,
            self.seed,
            self.timing_ms
        )
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}
