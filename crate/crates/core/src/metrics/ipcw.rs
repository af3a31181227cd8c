//! Inverse-probability-of-censoring weighted discrimination and calibration
//! estimators.
//!
//! Every estimator takes an origin time `s`: only subjects with `T > s`
//! enter, and censoring weights are conditional, `G(u | s) = G(u) / G(s)`.
//! Static evaluation is the special case `s = 0`. Event weights use the left
//! limit `G(T_i-)`. Tied risk scores earn half credit.

use serde::{Deserialize, Serialize};

use super::km::StepFunction;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::infer::SurvivalCurve;

pub const TIE_CREDIT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    /// Truncation horizon for the concordance index: events after it are
    /// not used as the earlier member of a pair.
    pub t_max: f64,
}

impl MetricConfig {
    pub fn new(t_max: f64) -> Result<Self> {
        if !(t_max > 0.0) {
            return Err(Error::InvalidInput(format!("t_max must be positive, got {t_max}")));
        }
        Ok(Self { t_max })
    }

    /// `t_max` set to the largest observed training time.
    pub fn from_training_times(times: &[f64]) -> Result<Self> {
        Self::new(times.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }
}

fn check_lengths(a: usize, b: usize, c: usize) -> Result<()> {
    if a != b || a != c {
        return Err(Error::InvalidInput("metric inputs differ in length".into()));
    }
    Ok(())
}

/// `G(s)`, erroring when the censoring distribution has no mass past `s`.
fn origin_mass(g: &StepFunction, s: f64) -> Result<f64> {
    let mass = g.eval(s);
    if mass <= 0.0 {
        return Err(Error::NoCensoringSupport(s));
    }
    Ok(mass)
}

/// Fenwick tree of counts over dense risk ranks.
struct Fenwick(Vec<usize>);

impl Fenwick {
    fn new(n: usize) -> Self {
        Self(vec![0; n + 1])
    }

    fn add(&mut self, rank: usize) {
        let mut i = rank + 1;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count of inserted ranks `< rank`.
    fn below(&self, rank: usize) -> usize {
        let mut i = rank;
        let mut total = 0;
        while i > 0 {
            total += self.0[i];
            i -= i & i.wrapping_neg();
        }
        total
    }
}

fn dense_ranks(values: &[f64]) -> (Vec<usize>, usize) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let ranks = values
        .iter()
        .map(|v| sorted.partition_point(|x| x.total_cmp(v).is_lt()))
        .collect();
    (ranks, sorted.len())
}

/// Uno's truncated concordance index conditional on survival past `origin`.
pub fn cindex_from(
    origin: f64,
    risks: &[f64],
    times: &[f64],
    events: &[bool],
    censoring: &StepFunction,
    config: &MetricConfig,
) -> Result<f64> {
    check_lengths(risks.len(), times.len(), events.len())?;
    let base = origin_mass(censoring, origin)?;
    let cohort: Vec<usize> = (0..times.len()).filter(|&i| times[i] > origin).collect();
    let cohort_risks: Vec<f64> = cohort.iter().map(|&i| risks[i]).collect();
    let (ranks, levels) = dense_ranks(&cohort_risks);

    // walk from the latest time down; a tied-time group is queried before it
    // is inserted so that only strictly later subjects are counted
    let mut order: Vec<usize> = (0..cohort.len()).collect();
    order.sort_by(|&a, &b| times[cohort[b]].total_cmp(&times[cohort[a]]));
    let mut tree = Fenwick::new(levels);
    let mut inserted = 0usize;
    let (mut numerator, mut denominator) = (0.0, 0.0);
    let mut g = 0;
    while g < order.len() {
        let t = times[cohort[order[g]]];
        let mut h = g;
        while h < order.len() && times[cohort[order[h]]] == t {
            h += 1;
        }
        for &p in &order[g..h] {
            let i = cohort[p];
            if !events[i] || times[i] > config.t_max || inserted == 0 {
                continue;
            }
            let survive = censoring.left_limit(times[i]) / base;
            if survive <= 0.0 {
                return Err(Error::NoCensoringSupport(times[i]));
            }
            let w = 1.0 / (survive * survive);
            let below = tree.below(ranks[p]);
            let equal = tree.below(ranks[p] + 1) - below;
            numerator += w * (below as f64 + TIE_CREDIT * equal as f64);
            denominator += w * inserted as f64;
        }
        for &p in &order[g..h] {
            tree.add(ranks[p]);
        }
        inserted += h - g;
        g = h;
    }
    if denominator == 0.0 {
        return Err(Error::NoComparablePairs);
    }
    Ok(numerator / denominator)
}

pub fn cindex_ipcw(
    risks: &[f64],
    times: &[f64],
    events: &[bool],
    censoring: &StepFunction,
    config: &MetricConfig,
) -> Result<f64> {
    cindex_from(0.0, risks, times, events, censoring, config)
}

/// Cumulative/dynamic AUC at `t` among subjects surviving past `origin`:
/// cases have an observed event in `(origin, t]`, controls survive past `t`.
pub fn auc_from(
    origin: f64,
    risks: &[f64],
    times: &[f64],
    events: &[bool],
    censoring: &StepFunction,
    t: f64,
) -> Result<f64> {
    check_lengths(risks.len(), times.len(), events.len())?;
    let base = origin_mass(censoring, origin)?;
    let mut controls: Vec<f64> = (0..times.len())
        .filter(|&j| times[j] > t && times[j] > origin)
        .map(|j| risks[j])
        .collect();
    controls.sort_by(f64::total_cmp);
    let cases: Vec<usize> = (0..times.len())
        .filter(|&i| events[i] && times[i] > origin && times[i] <= t)
        .collect();
    if cases.is_empty() || controls.is_empty() {
        return Err(Error::Undefined(format!(
            "AUC at t = {t}: {} cases, {} controls",
            cases.len(),
            controls.len()
        )));
    }
    let (mut numerator, mut denominator) = (0.0, 0.0);
    for i in cases {
        let survive = censoring.left_limit(times[i]) / base;
        if survive <= 0.0 {
            return Err(Error::NoCensoringSupport(times[i]));
        }
        let w = 1.0 / survive;
        let below = controls.partition_point(|c| c.total_cmp(&risks[i]).is_lt());
        let upto = controls.partition_point(|c| c.total_cmp(&risks[i]).is_le());
        numerator += w * (below as f64 + TIE_CREDIT * (upto - below) as f64);
        denominator += w * controls.len() as f64;
    }
    Ok(numerator / denominator)
}

pub fn auc_at_time(
    risks: &[f64],
    times: &[f64],
    events: &[bool],
    censoring: &StepFunction,
    t: f64,
) -> Result<f64> {
    auc_from(0.0, risks, times, events, censoring, t)
}

/// Weighted mean of the AUCs at `eval_times` with weights
/// `S(t_prev | origin) - S(t | origin)` from the marginal survival estimate,
/// where `t_prev` starts at `origin`. Undefined AUCs are skipped.
pub fn integrated_auc_from(
    origin: f64,
    risks: &[f64],
    times: &[f64],
    events: &[bool],
    censoring: &StepFunction,
    survival: &StepFunction,
    eval_times: &[f64],
) -> Result<f64> {
    let s0 = survival.eval(origin);
    if s0 <= 0.0 {
        return Err(Error::Undefined(format!("no marginal survival past t = {origin}")));
    }
    let (mut numerator, mut denominator) = (0.0, 0.0);
    let mut prev = 1.0;
    for &t in eval_times {
        let current = survival.eval(t) / s0;
        let w = prev - current;
        prev = current;
        match auc_from(origin, risks, times, events, censoring, t) {
            Ok(auc) if w > 0.0 => {
                numerator += auc * w;
                denominator += w;
            }
            Ok(_) | Err(Error::Undefined(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if denominator <= 0.0 {
        return Err(Error::Undefined("integrated AUC has no weighted defined time point".into()));
    }
    Ok(numerator / denominator)
}

pub fn integrated_auc(
    risks: &[f64],
    times: &[f64],
    events: &[bool],
    censoring: &StepFunction,
    survival: &StepFunction,
    grid: &Grid,
) -> Result<f64> {
    integrated_auc_from(0.0, risks, times, events, censoring, survival, grid.boundaries())
}

/// IPCW Brier score at `t` for predicted survival probabilities `S_i(t)`,
/// averaged over the subjects surviving past `origin`.
pub fn brier_from(
    origin: f64,
    predictions: &[f64],
    times: &[f64],
    events: &[bool],
    censoring: &StepFunction,
    t: f64,
) -> Result<f64> {
    check_lengths(predictions.len(), times.len(), events.len())?;
    let base = origin_mass(censoring, origin)?;
    let g_t = censoring.eval(t) / base;
    if g_t <= 0.0 {
        return Err(Error::NoCensoringSupport(t));
    }
    let mut total = 0.0;
    let mut n = 0usize;
    for i in 0..times.len() {
        if times[i] <= origin {
            continue;
        }
        n += 1;
        let s = predictions[i];
        if times[i] <= t && events[i] {
            let survive = censoring.left_limit(times[i]) / base;
            if survive <= 0.0 {
                return Err(Error::NoCensoringSupport(times[i]));
            }
            total += s * s / survive;
        } else if times[i] > t {
            total += (1.0 - s) * (1.0 - s) / g_t;
        }
    }
    if n == 0 {
        return Err(Error::Undefined(format!("no subjects at risk after t = {origin}")));
    }
    Ok(total / n as f64)
}

pub fn brier_at_time(
    predictions: &[f64],
    times: &[f64],
    events: &[bool],
    censoring: &StepFunction,
    t: f64,
) -> Result<f64> {
    brier_from(0.0, predictions, times, events, censoring, t)
}

/// Trapezoidal integral of `values` over `times`, divided by the span.
pub fn integrated_brier(values: &[f64], times: &[f64]) -> Result<f64> {
    if values.len() != times.len() {
        return Err(Error::InvalidInput("brier values and times differ in length".into()));
    }
    if values.len() < 2 {
        return Err(Error::CannotIntegrate);
    }
    let area: f64 = values
        .windows(2)
        .zip(times.windows(2))
        .map(|(v, t)| 0.5 * (v[0] + v[1]) * (t[1] - t[0]))
        .sum();
    Ok(area / (times[times.len() - 1] - times[0]))
}

/// The three survival metrics of one evaluation, each possibly undefined.
#[derive(Debug)]
pub struct SurvivalMetrics {
    pub cindex: Result<f64>,
    pub integrated_auc: Result<f64>,
    pub ibs: Result<f64>,
}

/// Static evaluation over the full grid. `curves[i].values[k-1]` is the
/// predicted `S(t_k | x_i)`.
#[allow(clippy::too_many_arguments)]
pub fn static_metrics(
    risks: &[f64],
    curves: &[SurvivalCurve],
    times: &[f64],
    events: &[bool],
    censoring: &StepFunction,
    survival: &StepFunction,
    grid: &Grid,
    config: &MetricConfig,
) -> SurvivalMetrics {
    evaluate(0.0, risks, curves, times, events, censoring, survival, grid.boundaries(), config)
}

/// Landmark evaluation at origin `t_k` over horizons `t_{k+1}..t_{K-1}`.
/// Inputs describe the subjects at risk at `t_k`; `curves[i].values[d-1]`
/// is the predicted `S(t_{k+d} | T > t_k, history)`.
#[allow(clippy::too_many_arguments)]
pub fn dynamic_metrics(
    risks: &[f64],
    curves: &[SurvivalCurve],
    times: &[f64],
    events: &[bool],
    censoring: &StepFunction,
    survival: &StepFunction,
    grid: &Grid,
    k: usize,
    config: &MetricConfig,
) -> SurvivalMetrics {
    let last = grid.intervals() - 1;
    if k >= last {
        let e = || Err(Error::NoHorizons(k));
        return SurvivalMetrics { cindex: e(), integrated_auc: e(), ibs: e() };
    }
    let origin = grid.time(k);
    let horizons = &grid.boundaries()[k..];
    evaluate(origin, risks, curves, times, events, censoring, survival, horizons, config)
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    origin: f64,
    risks: &[f64],
    curves: &[SurvivalCurve],
    times: &[f64],
    events: &[bool],
    censoring: &StepFunction,
    survival: &StepFunction,
    eval_times: &[f64],
    config: &MetricConfig,
) -> SurvivalMetrics {
    if !times.iter().any(|&t| t > origin) {
        let e = || Err(Error::Undefined(format!("empty risk set at t = {origin}")));
        return SurvivalMetrics { cindex: e(), integrated_auc: e(), ibs: e() };
    }
    let cindex = cindex_from(origin, risks, times, events, censoring, config);
    let integrated_auc = integrated_auc_from(origin, risks, times, events, censoring, survival, eval_times);
    let ibs = (|| {
        if curves.len() != times.len() || curves.iter().any(|c| c.len() != eval_times.len()) {
            return Err(Error::InvalidInput("curves do not match the evaluation grid".into()));
        }
        let mut scores = Vec::with_capacity(eval_times.len());
        for (j, &t) in eval_times.iter().enumerate() {
            let predictions: Vec<f64> = curves.iter().map(|c| c.values[j]).collect();
            scores.push(brier_from(origin, &predictions, times, events, censoring, t)?);
        }
        integrated_brier(&scores, eval_times)
    })();
    SurvivalMetrics { cindex, integrated_auc, ibs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::km::censoring_km;

    fn cfg() -> MetricConfig {
        MetricConfig::new(100.0).unwrap()
    }

    #[test]
    fn cindex_extremes_without_censoring() {
        let times = [1.0, 2.0, 3.0, 4.0];
        let events = [true; 4];
        let g = StepFunction::one();
        assert_eq!(cindex_ipcw(&[4.0, 3.0, 2.0, 1.0], &times, &events, &g, &cfg()).unwrap(), 1.0);
        assert_eq!(cindex_ipcw(&[1.0, 2.0, 3.0, 4.0], &times, &events, &g, &cfg()).unwrap(), 0.0);
        assert_eq!(cindex_ipcw(&[1.0; 4], &times, &events, &g, &cfg()).unwrap(), 0.5);
    }

    #[test]
    fn cindex_needs_pairs() {
        let g = StepFunction::one();
        assert!(matches!(
            cindex_ipcw(&[1.0, 2.0], &[1.0, 2.0], &[false, false], &g, &cfg()),
            Err(Error::NoComparablePairs)
        ));
    }

    #[test]
    fn auc_extremes() {
        let times = [1.0, 2.0, 3.0, 4.0];
        let events = [true; 4];
        let g = StepFunction::one();
        assert_eq!(auc_at_time(&[4.0, 3.0, 2.0, 1.0], &times, &events, &g, 2.0).unwrap(), 1.0);
        assert_eq!(auc_at_time(&[1.0; 4], &times, &events, &g, 2.0).unwrap(), 0.5);
        assert!(matches!(auc_at_time(&[1.0; 4], &times, &events, &g, 0.5), Err(Error::Undefined(_))));
        assert!(matches!(auc_at_time(&[1.0; 4], &times, &events, &g, 4.0), Err(Error::Undefined(_))));
    }

    #[test]
    fn integrated_auc_weights() {
        // marginal S = (0.8, 0.5, 0.2) at (1, 2, 3) gives weights (0.2, 0.3, 0.3)
        let s = StepFunction::new(vec![1.0, 2.0, 3.0], vec![0.8, 0.5, 0.2]).unwrap();
        let times = [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0];
        let events = [true; 7];
        let risks = [0.9, 0.1, 0.8, 0.3, 0.2, 0.7, 0.05];
        let g = StepFunction::one();
        let grid = Grid::new(vec![1.0, 2.0, 3.0]).unwrap();
        let a: Vec<f64> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&t| auc_at_time(&risks, &times, &events, &g, t).unwrap())
            .collect();
        let expect = (0.2 * a[0] + 0.3 * a[1] + 0.3 * a[2]) / 0.8;
        let got = integrated_auc(&risks, &times, &events, &g, &s, &grid).unwrap();
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn integrated_auc_single_boundary() {
        let times = [1.0, 2.0, 3.0];
        let events = [true; 3];
        let risks = [0.3, 0.5, 0.1];
        let g = StepFunction::one();
        let s = StepFunction::new(vec![1.0, 2.0, 3.0], vec![0.6, 0.3, 0.0]).unwrap();
        let grid = Grid::new(vec![1.5]).unwrap();
        let single = auc_at_time(&risks, &times, &events, &g, 1.5).unwrap();
        assert_eq!(integrated_auc(&risks, &times, &events, &g, &s, &grid).unwrap(), single);
    }

    #[test]
    fn brier_simple_cases() {
        let times = [1.0, 2.0, 3.0, 4.0];
        let events = [true; 4];
        let g = StepFunction::one();
        let perfect = [0.0, 0.0, 1.0, 1.0];
        assert_eq!(brier_at_time(&perfect, &times, &events, &g, 2.5).unwrap(), 0.0);
        assert_eq!(brier_at_time(&[0.5; 4], &times, &events, &g, 2.5).unwrap(), 0.25);
        let dead = censoring_km(&[1.0, 2.0], &[false, false]).unwrap();
        assert!(brier_at_time(&[0.5; 2], &[1.0, 2.0], &[false, false], &dead, 2.0).is_err());
    }

    #[test]
    fn trapezoid() {
        assert!((integrated_brier(&[0.1, 0.2, 0.1], &[1.0, 2.0, 3.0]).unwrap() - 0.15).abs() < 1e-15);
        assert!((integrated_brier(&[0.3; 4], &[1.0, 2.0, 5.0, 6.0]).unwrap() - 0.3).abs() < 1e-15);
        assert!((integrated_brier(&[0.1, 0.4], &[2.0, 7.0]).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(integrated_brier(&[0.1], &[1.0]), Err(Error::CannotIntegrate)));
    }

    #[test]
    fn last_origin_has_single_horizon() {
        let grid = Grid::new(vec![1.0, 2.0, 3.0]).unwrap();
        let times = [2.5, 3.5, 4.0, 2.8];
        let events = [true; 4];
        let curves: Vec<SurvivalCurve> = [0.4, 0.7, 0.8, 0.5]
            .iter()
            .map(|&v| SurvivalCurve { times: vec![3.0], values: vec![v] })
            .collect();
        let risks: Vec<f64> = curves.iter().map(|c| 1.0 - c.values[0]).collect();
        let g = StepFunction::one();
        let s = crate::metrics::kaplan_meier(&times, &events).unwrap();
        let m = dynamic_metrics(&risks, &curves, &times, &events, &g, &s, &grid, 2, &cfg());
        let auc = auc_from(2.0, &risks, &times, &events, &g, 3.0).unwrap();
        assert_eq!(m.integrated_auc.unwrap(), auc);
        assert!(matches!(m.ibs, Err(Error::CannotIntegrate)));
    }
}
