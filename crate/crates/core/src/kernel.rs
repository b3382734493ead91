//! Kernels over (feature, label) samples.
//!
//! Four variants cover the tests in this crate:
//!
//! - **Exponential** `k(x, y) = exp(x^T y / d)`, the image-space kernel;
//!   `d` is the feature dimension, not a tuned bandwidth.
//! - **DeltaLabel** `k(a, b) = 1` iff the labels are equal — the right choice
//!   for a small label set.
//! - **HierarchyPath** scores labels by local alignment of their
//!   root-to-leaf paths in a label hierarchy, so that nearby leaves of the
//!   same subtree count as similar.
//! - **Product** of one image kernel and one label kernel, giving a kernel
//!   on the joint (feature, label) space for conditional-model tests.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::dot;
use crate::{Error, Result};

/// A borrowed sample: feature vector plus optional label.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub features: &'a [f64],
    pub label: Option<&'a str>,
}

impl<'a> Sample<'a> {
    pub fn new(features: &'a [f64], label: Option<&'a str>) -> Self {
        Sample { features, label }
    }

    fn label_or(&self, what: &'static str) -> Result<&'a str> {
        self.label.ok_or(Error::MissingLabels(what))
    }
}

/// Root-to-leaf label paths, keyed by label id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabelHierarchy {
    paths: BTreeMap<String, Vec<String>>,
}

impl LabelHierarchy {
    /// Validates that every path is non-empty and ends at the label itself.
    pub fn new(paths: BTreeMap<String, Vec<String>>) -> Result<Self> {
        for (label, path) in &paths {
            if path.is_empty() {
                return Err(Error::InvalidKernel("empty hierarchy path"));
            }
            if path.last().map(String::as_str) != Some(label.as_str()) {
                return Err(Error::InvalidKernel("hierarchy path must end at its own label"));
            }
        }
        Ok(LabelHierarchy { paths })
    }

    pub fn path(&self, label: &str) -> Result<&[String]> {
        self.paths
            .get(label)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::LabelNotInHierarchy(String::from(label)))
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

/// Kernel variant descriptor.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `exp(x^T y / dim_normalizer)`; the normalizer must equal the feature
    /// dimension of the samples it is applied to.
    Exponential { dim_normalizer: usize },
    /// Indicator of label equality.
    DeltaLabel,
    /// Local-alignment score of the two labels' hierarchy paths.
    HierarchyPath(LabelHierarchy),
    /// Image kernel times label kernel.
    Product(Box<KernelSpec>, Box<KernelSpec>),
}

impl KernelSpec {
    /// Exponential image kernel for features of dimension `dim`.
    pub fn exponential(dim: usize) -> Self {
        KernelSpec::Exponential { dim_normalizer: dim }
    }

    /// Exponential image kernel times the delta label kernel.
    pub fn product_delta(dim: usize) -> Self {
        KernelSpec::Product(Box::new(Self::exponential(dim)), Box::new(KernelSpec::DeltaLabel))
    }

    /// Exponential image kernel times the hierarchy-path label kernel.
    pub fn product_hierarchy(dim: usize, hierarchy: LabelHierarchy) -> Self {
        KernelSpec::Product(
            Box::new(Self::exponential(dim)),
            Box::new(KernelSpec::HierarchyPath(hierarchy)),
        )
    }

    /// True for variants that read the label.
    pub fn uses_labels(&self) -> bool {
        match self {
            KernelSpec::Exponential { .. } => false,
            KernelSpec::DeltaLabel | KernelSpec::HierarchyPath(_) => true,
            KernelSpec::Product(a, b) => a.uses_labels() || b.uses_labels(),
        }
    }

    /// Structural validation: a product composes exactly one image kernel
    /// with exactly one label kernel, and nothing nests further.
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Exponential { dim_normalizer } => {
                if *dim_normalizer == 0 {
                    return Err(Error::InvalidKernel("dim_normalizer must be positive"));
                }
                Ok(())
            }
            KernelSpec::DeltaLabel | KernelSpec::HierarchyPath(_) => Ok(()),
            KernelSpec::Product(image, label) => {
                if !matches!(**image, KernelSpec::Exponential { .. }) {
                    return Err(Error::InvalidKernel("product image factor must be an image kernel"));
                }
                if !matches!(**label, KernelSpec::DeltaLabel | KernelSpec::HierarchyPath(_)) {
                    return Err(Error::InvalidKernel("product label factor must be a label kernel"));
                }
                Ok(())
            }
        }
    }
}

/// Evaluates `k(a, b)` for any kernel variant.
pub fn eval_kernel(kernel: &KernelSpec, a: Sample<'_>, b: Sample<'_>) -> Result<f64> {
    match kernel {
        KernelSpec::Exponential { dim_normalizer } => {
            if a.features.len() != b.features.len() {
                return Err(Error::DimensionMismatch {
                    expected: a.features.len(),
                    got: b.features.len(),
                });
            }
            if *dim_normalizer != a.features.len() {
                return Err(Error::DimensionMismatch {
                    expected: *dim_normalizer,
                    got: a.features.len(),
                });
            }
            Ok(libm::exp(dot(a.features, b.features) / *dim_normalizer as f64))
        }
        KernelSpec::DeltaLabel => {
            let la = a.label_or("delta kernel")?;
            let lb = b.label_or("delta kernel")?;
            Ok(if la == lb { 1.0 } else { 0.0 })
        }
        KernelSpec::HierarchyPath(h) => {
            let la = a.label_or("hierarchy kernel")?;
            let lb = b.label_or("hierarchy kernel")?;
            Ok(hierarchy_path_score(h.path(la)?, h.path(lb)?) as f64)
        }
        KernelSpec::Product(image, label) => {
            Ok(eval_kernel(image, a, b)? * eval_kernel(label, a, b)?)
        }
    }
}

/// Local-alignment score of two node sequences with match = 1, mismatch = 0
/// and no gap penalty (Smith-Waterman with an identity substitution matrix).
///
/// With these parameters the score equals the length of the longest common
/// subsequence, and the zero-gap scoring makes it a positive-definite string
/// kernel.
pub fn hierarchy_path_score<S: AsRef<str>>(path_a: &[S], path_b: &[S]) -> usize {
    if path_a.is_empty() || path_b.is_empty() {
        return 0;
    }
    let cols = path_b.len() + 1;
    let mut prev = vec![0usize; cols];
    let mut cur = vec![0usize; cols];
    let mut best = 0;
    for a in path_a {
        for (j, b) in path_b.iter().enumerate() {
            let sub = prev[j] + usize::from(a.as_ref() == b.as_ref());
            cur[j + 1] = sub.max(prev[j + 1]).max(cur[j]);
            best = best.max(cur[j + 1]);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn owned(parts: &[&str]) -> Vec<String> {
        parts.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn exponential_of_zero_vectors_is_one() {
        let k = KernelSpec::exponential(3);
        let z = [0.0; 3];
        let v = eval_kernel(&k, Sample::new(&z, None), Sample::new(&z, None)).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn exponential_matches_analytic_value() {
        // d = 2, a = b = (1, 1): exp(2/2) = e.
        let k = KernelSpec::exponential(2);
        let a = [1.0, 1.0];
        let v = eval_kernel(&k, Sample::new(&a, None), Sample::new(&a, None)).unwrap();
        assert!((v - core::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn exponential_rejects_wrong_normalizer() {
        let k = KernelSpec::exponential(3);
        let a = [1.0, 1.0];
        assert!(eval_kernel(&k, Sample::new(&a, None), Sample::new(&a, None)).is_err());
    }

    #[test]
    fn product_delta_zeroes_cross_label_pairs() {
        let k = KernelSpec::product_delta(2);
        let f = [0.5, -0.5];
        let a = Sample::new(&f, Some("cat"));
        let b = Sample::new(&f, Some("dog"));
        assert_eq!(eval_kernel(&k, a, b).unwrap(), 0.0);
        let same = Sample::new(&f, Some("cat"));
        assert!(eval_kernel(&k, a, same).unwrap() > 0.0);
    }

    #[test]
    fn delta_without_labels_errors() {
        let f = [1.0];
        let err = eval_kernel(&KernelSpec::DeltaLabel, Sample::new(&f, None), Sample::new(&f, None));
        assert!(matches!(err, Err(Error::MissingLabels(_))));
    }

    #[test]
    fn path_score_self_alignment_is_length() {
        let p = owned(&["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k"]);
        assert_eq!(hierarchy_path_score(&p, &p), 11);
    }

    #[test]
    fn path_score_matches_lcs_on_small_case() {
        let a = owned(&["a", "b", "c", "d"]);
        let b = owned(&["a", "b", "e", "d"]);
        assert_eq!(hierarchy_path_score(&a, &b), 3);
    }

    #[test]
    fn path_score_empty_is_zero() {
        let a: Vec<String> = Vec::new();
        let b = owned(&["x", "y"]);
        assert_eq!(hierarchy_path_score(&a, &b), 0);
    }

    #[test]
    fn hierarchy_requires_leaf_to_match_label() {
        let mut paths = BTreeMap::new();
        paths.insert("collie".to_string(), owned(&["animal", "dog"]));
        assert!(LabelHierarchy::new(paths).is_err());
    }

    #[test]
    fn hierarchy_kernel_scores_shared_prefix() {
        let mut paths = BTreeMap::new();
        paths.insert("collie".to_string(), owned(&["animal", "dog", "collie"]));
        paths.insert("poodle".to_string(), owned(&["animal", "dog", "poodle"]));
        paths.insert("mug".to_string(), owned(&["artifact", "mug"]));
        let h = LabelHierarchy::new(paths).unwrap();
        let k = KernelSpec::HierarchyPath(h);
        let f = [0.0];
        let collie = Sample::new(&f, Some("collie"));
        let poodle = Sample::new(&f, Some("poodle"));
        let mug = Sample::new(&f, Some("mug"));
        assert_eq!(eval_kernel(&k, collie, poodle).unwrap(), 2.0);
        assert_eq!(eval_kernel(&k, collie, mug).unwrap(), 0.0);
        assert_eq!(eval_kernel(&k, collie, collie).unwrap(), 3.0);
    }

    #[test]
    fn product_validation_rejects_label_only_products() {
        let bad = KernelSpec::Product(
            Box::new(KernelSpec::DeltaLabel),
            Box::new(KernelSpec::DeltaLabel),
        );
        assert!(bad.validate().is_err());
        assert!(KernelSpec::product_delta(4).validate().is_ok());
    }
}
