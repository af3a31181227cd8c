//! Probabilistic binary classifiers and the cross-entropy objective.

mod external;
mod frequency;
mod logistic;
mod stumps;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use external::{external_fit_predict, ExternalClassifier, DEFAULT_MESSAGE_TIMEOUT};
pub use frequency::FrequencyClassifier;
pub use logistic::{logistic_objective, LogisticRegression};
pub use stumps::BoostedStumps;

/// Log clamp for probabilities entering the cross-entropy.
pub const PROB_EPS: f64 = 1e-12;

/// A binary classifier producing probabilities of the positive class.
pub trait Classifier: Send + Sync {
    fn fit(&mut self, features: ArrayView2<'_, f64>, labels: &[bool]) -> Result<()>;

    /// One probability per row. Errors if called before `fit`.
    fn predict_proba(&self, features: ArrayView2<'_, f64>) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub l2_penalty: f64,
    pub boosting_rounds: usize,
    pub learning_rate: f64,
    pub histogram_bins: usize,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            gradient_tolerance: 1e-8,
            l2_penalty: 1e-4,
            boosting_rounds: 200,
            learning_rate: 0.1,
            histogram_bins: 32,
            seed: 0,
        }
    }
}

/// Binary cross-entropy of probability `p` against label `y`, with `p`
/// clamped to `[1e-12, 1 - 1e-12]`.
pub fn bce(p: f64, y: bool) -> f64 {
    let p = p.clamp(PROB_EPS, 1.0 - PROB_EPS);
    if y {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Mean cross-entropy of `classifier` over a labeled design.
pub fn dataset_bce(classifier: &dyn Classifier, features: ArrayView2<'_, f64>, labels: &[bool]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::InvalidInput("no examples to score".into()));
    }
    if features.nrows() != labels.len() {
        return Err(Error::InvalidInput("feature rows and labels differ in length".into()));
    }
    let probs = checked_predict(classifier, features)?;
    Ok(mean_bce(&probs, labels))
}

pub fn mean_bce(probs: &[f64], labels: &[bool]) -> f64 {
    probs.iter().zip(labels).map(|(&p, &y)| bce(p, y)).sum::<f64>() / labels.len() as f64
}

/// `predict_proba` plus output validation (length and range).
pub fn checked_predict(classifier: &dyn Classifier, features: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    let probs = classifier.predict_proba(features)?;
    if probs.len() != features.nrows() {
        return Err(Error::InvalidInput(format!(
            "classifier returned {} probabilities for {} rows",
            probs.len(),
            features.nrows()
        )));
    }
    if let Some(&bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::ProbabilityOutOfRange(bad));
    }
    Ok(probs)
}

pub(crate) fn check_training(features: ArrayView2<'_, f64>, labels: &[bool]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::InvalidInput("at least one training example is required".into()));
    }
    if features.nrows() != labels.len() {
        return Err(Error::InvalidInput("feature rows and labels differ in length".into()));
    }
    check_finite(features)
}

pub(crate) fn check_finite(features: ArrayView2<'_, f64>) -> Result<()> {
    if features.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("features"));
    }
    Ok(())
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn logit(p: f64) -> f64 {
    let p = p.clamp(PROB_EPS, 1.0 - PROB_EPS);
    (p / (1.0 - p)).ln()
}

/// Area under the ROC curve of `scores` against binary `labels`, ties
/// counted as one half. `None` without both classes.
pub fn classification_auc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let positives = labels.iter().filter(|&&y| y).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return None;
    }
    // Mann-Whitney: sum of mid-ranks of positives
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += mid * idx[i..=j].iter().filter(|&&r| labels[r]).count() as f64;
        i = j + 1;
    }
    let p = positives as f64;
    Some((rank_sum - p * (p + 1.0) / 2.0) / (p * negatives as f64))
}
