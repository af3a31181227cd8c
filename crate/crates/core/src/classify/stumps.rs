use ndarray::ArrayView2;

use super::{check_finite, check_training, logit, mean_bce, sigmoid, Classifier, TrainingConfig};
use crate::error::{Error, Result};

/// Leaf regularizer in the Newton leaf value `-G / (H + LAMBDA)`.
const LAMBDA: f64 = 1.0;

/// Gradient boosting of depth-one trees on the logistic loss.
///
/// Candidate thresholds come from per-feature quantile histograms of the
/// training data; each round takes the split with the largest Newton gain,
/// breaking ties by lowest feature index and then lowest threshold.
#[derive(Debug, Clone)]
pub struct BoostedStumps {
    config: TrainingConfig,
    fitted: Option<Ensemble>,
}

#[derive(Debug, Clone, PartialEq)]
struct Stump {
    /// `None` for a single-leaf round (no usable split).
    split: Option<(usize, f64)>,
    left: f64,
    right: f64,
}

#[derive(Debug, Clone)]
struct Ensemble {
    n_features: usize,
    base_score: f64,
    stumps: Vec<Stump>,
    train_loss: Vec<f64>,
}

impl BoostedStumps {
    pub fn new(config: TrainingConfig) -> Self {
        Self { config, fitted: None }
    }

    /// Training cross-entropy before the first round and after each round.
    pub fn training_loss(&self) -> &[f64] {
        self.fitted.as_ref().map_or(&[], |f| f.train_loss.as_slice())
    }

    /// `(feature, threshold)` chosen in each round.
    pub fn splits(&self) -> Vec<Option<(usize, f64)>> {
        self.fitted
            .as_ref()
            .map_or_else(Vec::new, |f| f.stumps.iter().map(|s| s.split).collect())
    }
}

impl Default for BoostedStumps {
    fn default() -> Self {
        Self::new(TrainingConfig::default())
    }
}

fn thresholds(column: impl Iterator<Item = f64>, bins: usize) -> Vec<f64> {
    let mut values: Vec<f64> = column.collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut cuts = if values.len() <= bins {
        values
    } else {
        let mut cuts: Vec<f64> = (1..bins)
            .map(|j| values[j * values.len() / bins])
            .collect();
        cuts.dedup();
        cuts.push(*values.last().unwrap());
        cuts
    };
    // x <= max sends everything left
    cuts.pop();
    cuts
}

impl Classifier for BoostedStumps {
    fn fit(&mut self, features: ArrayView2<'_, f64>, labels: &[bool]) -> Result<()> {
        check_training(features, labels)?;
        let cfg = &self.config;
        if cfg.histogram_bins < 2 || !(cfg.learning_rate > 0.0) {
            return Err(Error::InvalidInput("invalid boosting config".into()));
        }
        let n = labels.len();
        let d = features.ncols();
        let cuts: Vec<Vec<f64>> = (0..d)
            .map(|j| thresholds(features.column(j).iter().copied(), cfg.histogram_bins))
            .collect();
        // bin b means x <= cuts[b] (b == cuts.len() means above every cut)
        let binned: Vec<Vec<usize>> = (0..d)
            .map(|j| {
                features
                    .column(j)
                    .iter()
                    .map(|&x| cuts[j].partition_point(|&c| c < x))
                    .collect()
            })
            .collect();

        let positives = labels.iter().filter(|&&y| y).count() as f64;
        let base_score = logit(positives / n as f64);
        let mut raw = vec![base_score; n];
        let mut probs: Vec<f64> = raw.iter().map(|&z| sigmoid(z)).collect();
        let mut train_loss = vec![mean_bce(&probs, labels)];
        let mut stumps = Vec::with_capacity(cfg.boosting_rounds);

        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n];
        for _ in 0..cfg.boosting_rounds {
            for i in 0..n {
                grad[i] = probs[i] - if labels[i] { 1.0 } else { 0.0 };
                hess[i] = probs[i] * (1.0 - probs[i]);
            }
            let g_total: f64 = grad.iter().sum();
            let h_total: f64 = hess.iter().sum();
            let parent = g_total * g_total / (h_total + LAMBDA);

            let mut best: Option<(f64, usize, usize, f64, f64)> = None;
            for j in 0..d {
                if cuts[j].is_empty() {
                    continue;
                }
                let mut g_hist = vec![0.0; cuts[j].len() + 1];
                let mut h_hist = vec![0.0; cuts[j].len() + 1];
                for (i, &b) in binned[j].iter().enumerate() {
                    g_hist[b] += grad[i];
                    h_hist[b] += hess[i];
                }
                let (mut gl, mut hl) = (0.0, 0.0);
                for s in 0..cuts[j].len() {
                    gl += g_hist[s];
                    hl += h_hist[s];
                    let (gr, hr) = (g_total - gl, h_total - hl);
                    let gain = gl * gl / (hl + LAMBDA) + gr * gr / (hr + LAMBDA) - parent;
                    if best.is_none_or(|b| gain > b.0) {
                        best = Some((gain, j, s, gl / (hl + LAMBDA), gr / (hr + LAMBDA)));
                    }
                }
            }
            let lr = cfg.learning_rate;
            let stump = match best {
                Some((gain, j, s, left, right)) if gain > 0.0 => Stump {
                    split: Some((j, cuts[j][s])),
                    left: -lr * left,
                    right: -lr * right,
                },
                _ => {
                    let v = -lr * g_total / (h_total + LAMBDA);
                    Stump { split: None, left: v, right: v }
                }
            };
            for i in 0..n {
                raw[i] += match stump.split {
                    Some((j, c)) if features[(i, j)] > c => stump.right,
                    _ => stump.left,
                };
                probs[i] = sigmoid(raw[i]);
            }
            train_loss.push(mean_bce(&probs, labels));
            stumps.push(stump);
        }
        self.fitted = Some(Ensemble {
            n_features: d,
            base_score,
            stumps,
            train_loss,
        });
        Ok(())
    }

    fn predict_proba(&self, features: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        let f = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        if features.ncols() != f.n_features {
            return Err(Error::InvalidInput(format!(
                "expected {} features, got {}",
                f.n_features,
                features.ncols()
            )));
        }
        check_finite(features)?;
        Ok(features
            .rows()
            .into_iter()
            .map(|row| {
                let z = f.stumps.iter().fold(f.base_score, |acc, s| {
                    acc + match s.split {
                        Some((j, c)) if row[j] > c => s.right,
                        _ => s.left,
                    }
                });
                sigmoid(z)
            })
            .collect())
    }
}
