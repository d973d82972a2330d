//! Gaussian-kernel support vector classification of productivity labels from
//! the eight environmental ratings.
//!
//! Binary problems are solved by SMO; multiple labels are handled one-vs-one
//! with majority voting, ties going to the smallest label id.

mod kernel;
mod smo;

pub use kernel::gaussian_kernel;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ucp::{EnvRatings, ENVIRONMENTAL_FACTORS, MAX_RATING};
use kernel::KernelCache;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmConfig {
    pub penalty_c: f64,
    /// Kernel width; `None` derives `1 / (d * var)` from the scaled training features.
    pub gamma: Option<f64>,
    /// Tolerance on the maximal KKT violation.
    pub epsilon: f64,
    pub max_iterations: usize,
    pub kernel_cache_entries: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            penalty_c: 1.0,
            gamma: None,
            epsilon: 1e-3,
            max_iterations: 1000,
            kernel_cache_entries: 5000,
        }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.penalty_c) {
            return Err(Error::Config("svm.penalty_c must be positive".into()));
        }
        if let Some(g) = self.gamma {
            if !positive(g) {
                return Err(Error::Config("svm.gamma must be positive".into()));
            }
        }
        if !positive(self.epsilon) {
            return Err(Error::Config("svm.epsilon must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("svm.max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// `1 / (d * variance)` over every entry of the feature matrix; 1 when the
/// features are constant.
pub fn scale_gamma(points: &[Vec<f64>]) -> f64 {
    let values: Vec<f64> = points.iter().flatten().copied().collect();
    let dim = points.first().map_or(1, |p| p.len().max(1));
    if values.is_empty() {
        return 1.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var > 0.0 {
        1.0 / (dim as f64 * var)
    } else {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` for each support vector.
    pub dual_coefficients: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit before the KKT tolerance.
    pub converged: bool,
}

impl BinarySvmModel {
    pub fn decision_value(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coefficients)
            .map(|(sv, coef)| coef * gaussian_kernel(sv, x, self.gamma))
            .sum::<f64>()
            + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.decision_value(x) >= 0.0
    }
}

/// Train a binary classifier; `positive[i]` is the class of `points[i]`.
pub fn train_binary(
    points: &[Vec<f64>],
    positive: &[bool],
    config: &SvmConfig,
) -> Result<BinarySvmModel> {
    config.validate()?;
    if points.len() != positive.len() {
        return Err(Error::invalid("points and labels differ in length"));
    }
    if points.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim || p.iter().any(|v| !v.is_finite())) {
        return Err(Error::invalid("feature vectors must share one dimension and be finite"));
    }
    if positive.iter().all(|&p| p) || positive.iter().all(|&p| !p) {
        return Err(Error::invalid("binary training needs rows of both classes"));
    }
    let gamma = config.gamma.unwrap_or_else(|| scale_gamma(points));
    let y: Vec<f64> = positive.iter().map(|&p| if p { 1.0 } else { -1.0 }).collect();
    let mut cache = KernelCache::new(points, gamma, config.kernel_cache_entries);
    let sol = smo::solve(
        &mut cache,
        &y,
        config.penalty_c,
        config.epsilon,
        config.max_iterations,
    );
    if !sol.converged {
        log::warn!(
            "SMO stopped at the iteration cap ({}) before reaching epsilon {}",
            config.max_iterations,
            config.epsilon
        );
    }
    let mut support_vectors = Vec::new();
    let mut dual_coefficients = Vec::new();
    for (i, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(points[i].clone());
            dual_coefficients.push(a * y[i]);
        }
    }
    Ok(BinarySvmModel {
        support_vectors,
        dual_coefficients,
        bias: -sol.rho,
        gamma,
        iterations: sol.iterations,
        converged: sol.converged,
    })
}

/// Per-feature affine scaling captured at training time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaler {
    pub offsets: Vec<f64>,
    pub divisors: Vec<f64>,
}

impl FeatureScaler {
    /// Maps ratings `0..=5` onto `[0, 1]`.
    pub fn ratings() -> Self {
        Self {
            offsets: vec![0.0; ENVIRONMENTAL_FACTORS],
            divisors: vec![MAX_RATING as f64; ENVIRONMENTAL_FACTORS],
        }
    }

    pub fn apply(&self, env: &EnvRatings) -> Vec<f64> {
        env.values()
            .iter()
            .zip(self.offsets.iter().zip(&self.divisors))
            .map(|(&v, (o, d))| (v as f64 - o) / d)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseModel {
    /// Label id voted for on a nonnegative decision value (the smaller id).
    pub positive: usize,
    pub negative: usize,
    pub model: BinarySvmModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassSvmModel {
    /// Sorted, distinct label ids.
    pub classes: Vec<usize>,
    pub pairs: Vec<PairwiseModel>,
    pub scaler: FeatureScaler,
    pub gamma: f64,
}

pub fn train_multiclass(
    features: &[EnvRatings],
    labels: &[usize],
    config: &SvmConfig,
) -> Result<MulticlassSvmModel> {
    config.validate()?;
    if features.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if features.len() != labels.len() {
        return Err(Error::invalid("features and labels differ in length"));
    }
    let scaler = FeatureScaler::ratings();
    let points: Vec<Vec<f64>> = features.iter().map(|f| scaler.apply(f)).collect();
    let gamma = config.gamma.unwrap_or_else(|| scale_gamma(&points));
    let pair_config = SvmConfig {
        gamma: Some(gamma),
        ..*config
    };

    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();

    let mut pairs = Vec::new();
    for (a_pos, &a) in classes.iter().enumerate() {
        for &b in &classes[a_pos + 1..] {
            let mut sub_points = Vec::new();
            let mut sub_labels = Vec::new();
            for (p, &l) in points.iter().zip(labels) {
                if l == a || l == b {
                    sub_points.push(p.clone());
                    sub_labels.push(l == a);
                }
            }
            let model = train_binary(&sub_points, &sub_labels, &pair_config)?;
            pairs.push(PairwiseModel {
                positive: a,
                negative: b,
                model,
            });
        }
    }
    Ok(MulticlassSvmModel {
        classes,
        pairs,
        scaler,
        gamma,
    })
}

impl MulticlassSvmModel {
    pub fn predict_label(&self, env: &EnvRatings) -> Result<usize> {
        let (&first, rest) = self.classes.split_first().ok_or(Error::NotTrained)?;
        if rest.is_empty() {
            return Ok(first);
        }
        let x = self.scaler.apply(env);
        let mut votes = vec![0usize; self.classes.len()];
        for pair in &self.pairs {
            let winner = if pair.model.predict(&x) {
                pair.positive
            } else {
                pair.negative
            };
            let slot = self
                .classes
                .binary_search(&winner)
                .map_err(|_| Error::invalid(format!("pair votes for unknown label {winner}")))?;
            votes[slot] += 1;
        }
        // First maximum wins, so ties resolve to the smallest label id.
        let mut best = 0;
        for (slot, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = slot;
            }
        }
        Ok(self.classes[best])
    }

    pub fn training_accuracy(&self, features: &[EnvRatings], labels: &[usize]) -> Result<f64> {
        if features.is_empty() {
            return Err(Error::Empty("evaluation set"));
        }
        let mut hits = 0usize;
        for (f, &l) in features.iter().zip(labels) {
            if self.predict_label(f)? == l {
                hits += 1;
            }
        }
        Ok(hits as f64 / features.len() as f64)
    }

    pub fn converged(&self) -> bool {
        self.pairs.iter().all(|p| p.model.converged)
    }
}
