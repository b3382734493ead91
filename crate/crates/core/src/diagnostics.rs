//! From per-sample weights to interpretable reports.
//!
//! GEL weights become diagnostics once aggregated: per-class mass recovers
//! which modes a model dropped or under-sampled, Hellinger distance scores
//! the recovered mode distribution against an oracle, low-weight rankings
//! surface the individual samples a model cannot represent, and
//! precision-recall sweeps quantify how well low weights flag corrupted
//! labels. A seeded Gaussian-mixture generator provides the synthetic
//! fixtures used to validate all of the above.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::Mat;
use crate::moments::FeatureSet;
use crate::rng::Rng;
use crate::{Error, Result};

/// Weight cutoff shared with the solvers: at or below it a sample counts
/// as having zero probability.
pub const ZERO_WEIGHT_CUTOFF: f64 = crate::solver::ZERO_WEIGHT_CUTOFF;

/// Per-class aggregation of sample weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    /// Total weight mass per class id.
    pub class_mass: BTreeMap<String, f64>,
    /// Display-rescaled masses: `mass * rescale_count`, so a class at its
    /// ideal mass shows 1.0.
    pub rescaled: BTreeMap<String, f64>,
    /// Oracle distribution, when one was attached.
    pub oracle: Option<BTreeMap<String, f64>>,
    /// Hellinger distance of the recovered masses to the oracle.
    pub hellinger_to_oracle: Option<f64>,
}

impl ClassReport {
    /// Attaches an oracle distribution and scores the recovered masses
    /// against it. Classes absent on either side count as zero probability.
    pub fn attach_oracle(&mut self, oracle: &BTreeMap<String, f64>) {
        let mut keys: Vec<&String> = self.class_mass.keys().collect();
        for k in oracle.keys() {
            if !self.class_mass.contains_key(k) {
                keys.push(k);
            }
        }
        let p: Vec<f64> = keys.iter().map(|k| *oracle.get(*k).unwrap_or(&0.0)).collect();
        let q: Vec<f64> = keys.iter().map(|k| *self.class_mass.get(*k).unwrap_or(&0.0)).collect();
        self.hellinger_to_oracle = hellinger_distance(&p, &q).ok();
        self.oracle = Some(oracle.clone());
    }
}

/// Sums weights per class. `rescale_present_count`, when given, is the
/// number of classes actually present in the model sample; masses are
/// multiplied by it so present classes display at 1.0 in the balanced case.
/// Without it, the number of distinct labels is used.
pub fn aggregate_class_weights(
    weights: &[f64],
    labels: &[String],
    rescale_present_count: Option<usize>,
) -> Result<ClassReport> {
    if weights.len() != labels.len() {
        return Err(Error::LengthMismatch { expected: labels.len(), got: weights.len() });
    }
    if weights.is_empty() {
        return Err(Error::Empty("weights"));
    }
    let mut class_mass: BTreeMap<String, f64> = BTreeMap::new();
    for (w, l) in weights.iter().zip(labels) {
        *class_mass.entry(l.clone()).or_insert(0.0) += w;
    }
    let factor = rescale_present_count.unwrap_or(class_mass.len()) as f64;
    let rescaled = class_mass.iter().map(|(k, &v)| (k.clone(), v * factor)).collect();
    Ok(ClassReport { class_mass, rescaled, oracle: None, hellinger_to_oracle: None })
}

/// Hellinger distance `sqrt(1 - sum_i sqrt(p_i q_i))`, clamped to [0, 1].
///
/// Inputs must be nonnegative and close to normalized; both are renormalized
/// before the computation, so mild numerical drift is harmless.
pub fn hellinger_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { expected: p.len(), got: q.len() });
    }
    if p.is_empty() {
        return Err(Error::Empty("distribution"));
    }
    let sum_p: f64 = p.iter().sum();
    let sum_q: f64 = q.iter().sum();
    if !(sum_p > 0.0) || !(sum_q > 0.0) {
        return Err(Error::Empty("distribution mass"));
    }
    let mut bc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 && qi > 0.0 {
            bc += libm::sqrt((pi / sum_p) * (qi / sum_q));
        }
    }
    Ok(libm::sqrt((1.0 - bc).clamp(0.0, 1.0)))
}

/// Ground-truth mode distribution for controlled experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeSpec {
    /// Present classes share mass uniformly; dropped classes get zero.
    PresentDropped { present: Vec<String>, dropped: Vec<String> },
    /// Each group's total mass is split uniformly within the group.
    /// Group masses must sum to one.
    GroupProportions { groups: Vec<(Vec<String>, f64)> },
}

/// Expands a [`ModeSpec`] into a per-class probability map.
pub fn oracle_mode_distribution(spec: &ModeSpec) -> Result<BTreeMap<String, f64>> {
    match spec {
        ModeSpec::PresentDropped { present, dropped } => {
            if present.is_empty() {
                return Err(Error::AllClassesDropped);
            }
            let share = 1.0 / present.len() as f64;
            let mut out = BTreeMap::new();
            for c in present {
                out.insert(c.clone(), share);
            }
            for c in dropped {
                out.insert(c.clone(), 0.0);
            }
            Ok(out)
        }
        ModeSpec::GroupProportions { groups } => {
            let total: f64 = groups.iter().map(|(_, m)| m).sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidConfig("group masses must sum to 1"));
            }
            if groups.iter().all(|(_, m)| *m == 0.0) {
                return Err(Error::AllClassesDropped);
            }
            let mut out = BTreeMap::new();
            for (classes, mass) in groups {
                if classes.is_empty() {
                    return Err(Error::Empty("mode group"));
                }
                let share = mass / classes.len() as f64;
                for c in classes {
                    out.insert(c.clone(), share);
                }
            }
            Ok(out)
        }
    }
}

/// Sorts samples by ascending weight; ties break by ascending id.
pub fn rank_samples(weights: &[f64], ids: &[u64]) -> Result<Vec<(u64, f64)>> {
    if weights.len() != ids.len() {
        return Err(Error::LengthMismatch { expected: ids.len(), got: weights.len() });
    }
    let mut out: Vec<(u64, f64)> = ids.iter().copied().zip(weights.iter().copied()).collect();
    out.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    Ok(out)
}

/// The `k` lowest-weight samples.
pub fn bottom_k(ranked: &[(u64, f64)], k: usize) -> Result<&[(u64, f64)]> {
    if k > ranked.len() {
        return Err(Error::BottomKTooLarge { k, n: ranked.len() });
    }
    Ok(&ranked[..k])
}

/// Ids of samples whose weight is reported as exactly zero.
pub fn zero_weight_ids(weights: &[f64], ids: &[u64]) -> Result<Vec<u64>> {
    if weights.len() != ids.len() {
        return Err(Error::LengthMismatch { expected: ids.len(), got: weights.len() });
    }
    Ok(ids
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w <= ZERO_WEIGHT_CUTOFF)
        .map(|(&id, _)| id)
        .collect())
}

/// A precision-recall curve over weight thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct PrCurve {
    /// `(precision, recall)` pairs along the threshold sweep.
    pub points: Vec<(f64, f64)>,
    /// Trapezoidal area under the curve, in [0, 1].
    pub auc: f64,
}

/// Sweeps thresholds over the sorted unique weights, predicting "corrupted"
/// for every sample with weight at or below the threshold. Low weight is
/// the positive signal: a sample the solver priced out of the distribution.
pub fn pr_curve_from_weights(weights: &[f64], corrupted: &[bool]) -> Result<PrCurve> {
    if weights.len() != corrupted.len() {
        return Err(Error::LengthMismatch { expected: corrupted.len(), got: weights.len() });
    }
    let positives = corrupted.iter().filter(|&&c| c).count();
    if positives == 0 || positives == corrupted.len() {
        return Err(Error::DegenerateGroundTruth);
    }

    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[a].partial_cmp(&weights[b]).unwrap());

    let mut points = Vec::new();
    let mut tp = 0usize;
    let mut predicted = 0usize;
    let mut i = 0;
    while i < order.len() {
        let threshold = weights[order[i]];
        // Consume the whole tie group at this threshold.
        while i < order.len() && weights[order[i]] == threshold {
            predicted += 1;
            if corrupted[order[i]] {
                tp += 1;
            }
            i += 1;
        }
        let precision = tp as f64 / predicted as f64;
        let recall = tp as f64 / positives as f64;
        points.push((precision, recall));
    }

    // Anchor the sweep at recall zero with the first precision, then
    // integrate precision over recall.
    let mut auc = 0.0;
    let mut prev = (points[0].0, 0.0);
    for &(precision, recall) in &points {
        auc += (recall - prev.1) * (precision + prev.0) / 2.0;
        prev = (precision, recall);
    }
    Ok(PrCurve { points, auc })
}

/// Draws a `K`-mode isotropic Gaussian mixture with unit covariance.
///
/// Mode `k`'s mean is `s e_k + s 1`: separated modes on the coordinate
/// axes, shifted into the positive orthant. Labels are the mode indices as
/// decimal strings; deterministic in `seed`.
pub fn gen_gaussian_mixture(
    num_modes: usize,
    separation: f64,
    per_mode_counts: &[usize],
    dim: usize,
    seed: u64,
) -> Result<FeatureSet> {
    if num_modes == 0 {
        return Err(Error::Empty("modes"));
    }
    if num_modes > dim {
        return Err(Error::TooManyModes { modes: num_modes, dim });
    }
    if per_mode_counts.len() != num_modes {
        return Err(Error::LengthMismatch { expected: num_modes, got: per_mode_counts.len() });
    }
    let total: usize = per_mode_counts.iter().sum();
    if total == 0 {
        return Err(Error::Empty("samples"));
    }

    let mut rng = Rng::seed_from_u64(seed);
    let mut features = Mat::zeros(total, dim);
    let mut labels = Vec::with_capacity(total);
    let mut row = 0;
    for (mode, &count) in per_mode_counts.iter().enumerate() {
        let label = itoa(mode);
        for _ in 0..count {
            let out = features.row_mut(row);
            for (j, v) in out.iter_mut().enumerate() {
                let mean = separation * (1.0 + f64::from(u8::from(j == mode)));
                *v = mean + rng.normal();
            }
            labels.push(label.clone());
            row += 1;
        }
    }
    FeatureSet::new(features, Some(labels))
}

fn itoa(mut v: usize) -> String {
    if v == 0 {
        return String::from("0");
    }
    let mut digits = Vec::new();
    while v > 0 {
        digits.push(b'0' + (v % 10) as u8);
        v /= 10;
    }
    digits.reverse();
    String::from_utf8(digits).unwrap()
}
