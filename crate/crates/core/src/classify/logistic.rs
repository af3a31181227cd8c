use ndarray::{Array1, ArrayView1, ArrayView2, Axis};

use super::{check_finite, check_training, sigmoid, Classifier, TrainingConfig};
use crate::error::{Error, Result};

/// L2-penalized logistic regression fit by full-batch gradient descent with
/// Armijo backtracking, started from zero.
///
/// The descent runs in standardized coordinates (columns centered and
/// scaled by their training spread), which is an affine reparametrization
/// of the same objective; convergence is tested on the gradient in the
/// original coordinates.
#[derive(Debug, Clone)]
pub struct LogisticRegression {
    config: TrainingConfig,
    fitted: Option<Fitted>,
}

#[derive(Debug, Clone)]
struct Fitted {
    weights: Array1<f64>,
    intercept: f64,
    trace: Vec<f64>,
    converged: bool,
}

impl LogisticRegression {
    pub fn new(config: TrainingConfig) -> Self {
        Self { config, fitted: None }
    }

    pub fn weights(&self) -> Option<(ArrayView1<'_, f64>, f64)> {
        self.fitted.as_ref().map(|f| (f.weights.view(), f.intercept))
    }

    /// Objective value after each accepted step, starting at the zero model.
    pub fn objective_trace(&self) -> &[f64] {
        self.fitted.as_ref().map_or(&[], |f| f.trace.as_slice())
    }

    pub fn converged(&self) -> bool {
        self.fitted.as_ref().is_some_and(|f| f.converged)
    }
}

impl Default for LogisticRegression {
    fn default() -> Self {
        Self::new(TrainingConfig::default())
    }
}

/// Mean cross-entropy plus `l2 * |w|^2` (intercept unpenalized), with its
/// gradient `(d/dw, d/db)`.
pub fn logistic_objective(
    weights: ArrayView1<'_, f64>,
    intercept: f64,
    features: ArrayView2<'_, f64>,
    labels: &[bool],
    l2: f64,
) -> (f64, Array1<f64>, f64) {
    let n = labels.len() as f64;
    let z = features.dot(&weights) + intercept;
    let mut loss = 0.0;
    let mut residual = Array1::zeros(labels.len());
    for (i, (&zi, &y)) in z.iter().zip(labels).enumerate() {
        // softplus(z) - y z, evaluated stably
        let softplus = if zi > 0.0 { zi + (-zi).exp().ln_1p() } else { zi.exp().ln_1p() };
        loss += softplus - if y { zi } else { 0.0 };
        residual[i] = sigmoid(zi) - if y { 1.0 } else { 0.0 };
    }
    let grad_w = features.t().dot(&residual) / n + &weights * (2.0 * l2);
    let grad_b = residual.sum() / n;
    (loss / n + l2 * weights.dot(&weights), grad_w, grad_b)
}

const ARMIJO_C: f64 = 1e-4;

impl Classifier for LogisticRegression {
    fn fit(&mut self, features: ArrayView2<'_, f64>, labels: &[bool]) -> Result<()> {
        check_training(features, labels)?;
        let cfg = &self.config;
        if !(cfg.l2_penalty >= 0.0) || !(cfg.gradient_tolerance > 0.0) {
            return Err(Error::InvalidInput("invalid logistic training config".into()));
        }
        let d = features.ncols();
        let mean = features.mean_axis(Axis(0)).unwrap_or_else(|| Array1::zeros(d));
        let scale = features
            .std_axis(Axis(0), 0.0)
            .mapv(|s| if s > 1e-12 { s } else { 1.0 });
        let standardized = (&features - &mean) / &scale;
        // penalty l2 * sum (v_j / s_j)^2 in standardized coordinates
        let penalty = scale.mapv(|s| cfg.l2_penalty / (s * s));

        let objective = |v: &Array1<f64>, c: f64| -> (f64, Array1<f64>, f64) {
            let (loss, g, gb) = logistic_objective(v.view(), c, standardized.view(), labels, 0.0);
            let pen = (&penalty * v * v).sum();
            (loss + pen, g + &(&penalty * v * 2.0), gb)
        };
        let to_original = |v: &Array1<f64>, c: f64| -> (Array1<f64>, f64) {
            let w = v / &scale;
            let b = c - w.dot(&mean);
            (w, b)
        };

        let mut v = Array1::<f64>::zeros(d);
        let mut c = 0.0;
        let (mut value, mut gv, mut gc) = objective(&v, c);
        let mut trace = vec![value];
        let mut step = 1.0;
        let mut converged = false;
        for _ in 0..cfg.max_iterations {
            // d/dw_j = s_j d/dv_j + mu_j d/db
            let grad_inf = gv
                .iter()
                .zip(scale.iter().zip(mean.iter()))
                .map(|(g, (s, m))| (s * g + m * gc).abs())
                .fold(gc.abs(), f64::max);
            if grad_inf < cfg.gradient_tolerance {
                converged = true;
                break;
            }
            let sq = gv.dot(&gv) + gc * gc;
            step *= 2.0;
            let mut accepted = None;
            while step > 1e-20 {
                let v_new = &v - &(&gv * step);
                let c_new = c - step * gc;
                let next = objective(&v_new, c_new);
                if next.0 <= value - ARMIJO_C * step * sq {
                    accepted = Some((v_new, c_new, next));
                    break;
                }
                step *= 0.5;
            }
            let Some((v_new, c_new, (val, g, gb))) = accepted else {
                // no decrease representable in floating point
                break;
            };
            v = v_new;
            c = c_new;
            value = val;
            gv = g;
            gc = gb;
            trace.push(value);
        }
        let (weights, intercept) = to_original(&v, c);
        self.fitted = Some(Fitted { weights, intercept, trace, converged });
        Ok(())
    }

    fn predict_proba(&self, features: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        let f = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        if features.ncols() != f.weights.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} features, got {}",
                f.weights.len(),
                features.ncols()
            )));
        }
        check_finite(features)?;
        Ok(features
            .dot(&f.weights)
            .iter()
            .map(|&z| sigmoid(z + f.intercept))
            .collect())
    }
}
