//! Survival curves from classifier probabilities.
//!
//! In failure mode the classifier estimates `P(T <= t_k | x)` directly and
//! the curve is its complement, made nonincreasing by a running minimum.
//! In hazard mode it estimates the discrete hazard and the curve is the
//! cumulative product of `1 - hazard`.

use serde::{Deserialize, Serialize};

use crate::classify::{checked_predict, Classifier};
use crate::error::{Error, Result};
use crate::grid::{featurize_dynamic, static_features, to_matrix, FeatureOptions, Grid};
use crate::record::DynamicRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl SurvivalCurve {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Running minimum from early to late times.
pub fn clip_monotone(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut current = f64::INFINITY;
    for &v in values {
        current = current.min(v);
        out.push(current);
    }
    out
}

/// Curve from failure probabilities `p_k = P(T <= t_k)`.
pub fn survival_from_failure(times: Vec<f64>, failure: &[f64]) -> Result<SurvivalCurve> {
    if let Some(&bad) = failure.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::ProbabilityOutOfRange(bad));
    }
    let raw: Vec<f64> = failure.iter().map(|p| 1.0 - p).collect();
    Ok(SurvivalCurve {
        times,
        values: clip_monotone(&raw),
    })
}

pub fn survival_from_hazard(hazards: &HazardCurve) -> SurvivalCurve {
    let mut s = 1.0;
    let values = hazards
        .values
        .iter()
        .map(|h| {
            s *= 1.0 - h;
            s
        })
        .collect();
    SurvivalCurve {
        times: hazards.times.clone(),
        values,
    }
}

/// Which quantity the classifier was trained to predict at `(x, t_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Failure,
    Hazard,
}

/// Raw per-subject, per-boundary classifier outputs for static inputs,
/// predicted in one batch.
fn static_probabilities(classifier: &dyn Classifier, covariates: &[Vec<f64>], grid: &Grid) -> Result<Vec<Vec<f64>>> {
    let m = grid.boundaries().len();
    let rows: Vec<Vec<f64>> = covariates
        .iter()
        .flat_map(|x| grid.boundaries().iter().map(move |&t| static_features(x, t)))
        .collect();
    if rows.is_empty() {
        return Ok(vec![Vec::new(); covariates.len()]);
    }
    let probs = checked_predict(classifier, to_matrix(&rows)?.view())?;
    Ok(probs.chunks(m).map(<[f64]>::to_vec).collect())
}

pub fn survival_static(classifier: &dyn Classifier, covariates: &[f64], grid: &Grid) -> Result<SurvivalCurve> {
    Ok(survival_static_batch(classifier, &[covariates.to_vec()], grid, Target::Failure)?.remove(0))
}

pub fn survival_static_batch(
    classifier: &dyn Classifier,
    covariates: &[Vec<f64>],
    grid: &Grid,
    target: Target,
) -> Result<Vec<SurvivalCurve>> {
    static_probabilities(classifier, covariates, grid)?
        .into_iter()
        .map(|p| match target {
            Target::Failure => survival_from_failure(grid.boundaries().to_vec(), &p),
            Target::Hazard => Ok(survival_from_hazard(&HazardCurve {
                times: grid.boundaries().to_vec(),
                values: p,
            })),
        })
        .collect()
}

/// Mean predicted failure probability over the curve.
pub fn risk_static(curve: &SurvivalCurve) -> Result<f64> {
    mean_failure(curve)
}

/// Mean predicted failure probability over the remaining horizons.
pub fn risk_dynamic(curve: &SurvivalCurve) -> Result<f64> {
    mean_failure(curve)
}

fn mean_failure(curve: &SurvivalCurve) -> Result<f64> {
    if curve.is_empty() {
        return Err(Error::InvalidInput("empty survival curve".into()));
    }
    Ok(curve.values.iter().map(|s| 1.0 - s).sum::<f64>() / curve.len() as f64)
}

/// Conditional survival `S(t_{k+d} | T > t_k, history)` for `d = 1..K-1-k`.
pub fn survival_dynamic(
    classifier: &dyn Classifier,
    record: &DynamicRecord,
    grid: &Grid,
    k: usize,
    options: FeatureOptions,
) -> Result<SurvivalCurve> {
    Ok(survival_dynamic_batch(classifier, std::slice::from_ref(record), grid, k, options)?.remove(0))
}

pub fn survival_dynamic_batch(
    classifier: &dyn Classifier,
    records: &[DynamicRecord],
    grid: &Grid,
    k: usize,
    options: FeatureOptions,
) -> Result<Vec<SurvivalCurve>> {
    let last = grid.intervals() - 1;
    if k >= last {
        return Err(Error::NoHorizons(k));
    }
    let horizons = last - k;
    let mut rows = Vec::with_capacity(records.len() * horizons);
    for r in records {
        for h in k + 1..=last {
            rows.push(featurize_dynamic(r, grid, k, h, options)?);
        }
    }
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    let probs = checked_predict(classifier, to_matrix(&rows)?.view())?;
    let times = grid.boundaries()[k..].to_vec();
    probs
        .chunks(horizons)
        .map(|p| survival_from_failure(times.clone(), p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::Observation;
    use ndarray::ArrayView2;

    /// Replays a fixed probability sequence, cycling per row.
    struct Scripted(Vec<f64>);

    impl Classifier for Scripted {
        fn fit(&mut self, _: ArrayView2<'_, f64>, _: &[bool]) -> Result<()> {
            Ok(())
        }
        fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
            Ok((0..x.nrows()).map(|i| self.0[i % self.0.len()]).collect())
        }
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn static_clipping() {
        let g = Grid::new(vec![1.0, 2.0, 3.0]).unwrap();
        let c = survival_static(&Scripted(vec![0.3, 0.2, 0.5]), &[0.0], &g).unwrap();
        assert!(close(&c.values, &[0.7, 0.7, 0.5]));
        let ones = survival_static(&Scripted(vec![0.0]), &[0.0], &g).unwrap();
        assert_eq!(ones.values, vec![1.0; 3]);
        let mono = survival_static(&Scripted(vec![0.1, 0.2, 0.6]), &[0.0], &g).unwrap();
        assert!(close(&mono.values, &[0.9, 0.8, 0.4]));
    }

    #[test]
    fn bad_probability_is_an_error() {
        let g = Grid::new(vec![1.0]).unwrap();
        assert!(survival_static(&Scripted(vec![-0.1]), &[0.0], &g).is_err());
    }

    #[test]
    fn static_risk() {
        let curve = |v: Vec<f64>| SurvivalCurve { times: vec![1.0; v.len()], values: v };
        assert_eq!(risk_static(&curve(vec![1.0; 4])).unwrap(), 0.0);
        assert_eq!(risk_static(&curve(vec![0.0; 4])).unwrap(), 1.0);
        assert!((risk_static(&curve(vec![0.8, 0.6, 0.4, 0.2])).unwrap() - 0.5).abs() < 1e-15);
        assert!(risk_static(&curve(vec![])).is_err());
    }

    #[test]
    fn dynamic_risk() {
        let curve = |v: Vec<f64>| SurvivalCurve { times: vec![1.0; v.len()], values: v };
        assert!((risk_dynamic(&curve(vec![0.9, 0.8, 0.6])).unwrap() - 0.7 / 3.0).abs() < 1e-15);
        assert_eq!(risk_dynamic(&curve(vec![1.0, 1.0])).unwrap(), 0.0);
        assert_eq!(risk_dynamic(&curve(vec![0.25])).unwrap(), 0.75);
    }

    fn subject() -> DynamicRecord {
        DynamicRecord::new("a", vec![Observation { time: 0.0, covariates: vec![1.0] }], 10.0, false).unwrap()
    }

    #[test]
    fn dynamic_curves() {
        let g = Grid::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let opts = FeatureOptions::default();
        let last = survival_dynamic(&Scripted(vec![0.2]), &subject(), &g, 3, opts).unwrap();
        assert_eq!(last.len(), 1);
        let c = survival_dynamic(&Scripted(vec![0.1, 0.3, 0.2]), &subject(), &g, 1, opts).unwrap();
        assert!(close(&c.values, &[0.9, 0.7, 0.7]));
        assert_eq!(c.times, vec![2.0, 3.0, 4.0]);
        let ones = survival_dynamic(&Scripted(vec![0.0]), &subject(), &g, 0, opts).unwrap();
        assert_eq!(ones.values, vec![1.0; 4]);
        assert!(matches!(
            survival_dynamic(&Scripted(vec![0.0]), &subject(), &g, 4, opts),
            Err(Error::NoHorizons(4))
        ));
    }

    #[test]
    fn hazard_product() {
        let h = |v: Vec<f64>| HazardCurve { times: vec![0.0; v.len()], values: v };
        assert!(close(&survival_from_hazard(&h(vec![0.1, 0.2])).values, &[0.9, 0.72]));
        assert_eq!(survival_from_hazard(&h(vec![0.0; 3])).values, vec![1.0; 3]);
        assert_eq!(survival_from_hazard(&h(vec![0.3, 1.0, 0.2])).values[1..], [0.0, 0.0]);
    }
}
