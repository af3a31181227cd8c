//! Temporal discretization and expansion of censored records into binary
//! classification examples.
//!
//! Boundaries `t_1 < ... < t_{K-1}` split the time axis into intervals
//! `(t_{k-1}, t_k]` with `t_0 = 0` and a final open interval. A record
//! contributes the label `Y_k = 1(T <= t_k)` at boundary `k` only when that
//! label is observed.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::{DynamicRecord, StaticRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    boundaries: Vec<f64>,
}

impl Grid {
    pub fn new(boundaries: Vec<f64>) -> Result<Self> {
        if boundaries.is_empty() {
            return Err(Error::InvalidGrid("at least one boundary is required".into()));
        }
        if boundaries.iter().any(|b| !b.is_finite() || *b <= 0.0) {
            return Err(Error::InvalidGrid("boundaries must be finite and positive".into()));
        }
        if boundaries.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("boundaries must be strictly increasing".into()));
        }
        Ok(Self { boundaries })
    }

    /// Boundaries at the type-1 empirical quantiles `k/K`, `k = 1..K-1`, of
    /// the given event times. Repeated quantiles collapse, which lowers `K`.
    pub fn from_event_times(event_times: &[f64], k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidGrid(format!("K must be at least 2, got {k}")));
        }
        if event_times.is_empty() {
            return Err(Error::NoEventTimes);
        }
        if event_times.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::InvalidInput("event times must be finite and positive".into()));
        }
        let mut sorted = event_times.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut boundaries: Vec<f64> = Vec::with_capacity(k - 1);
        for level in 1..k {
            // smallest order statistic whose empirical CDF reaches level / k
            let rank = (n * level).div_ceil(k);
            let q = sorted[rank.max(1) - 1];
            if boundaries.last() != Some(&q) {
                boundaries.push(q);
            }
        }
        Self::new(boundaries)
    }

    /// Grid from the uncensored observed times of `records`.
    pub fn from_records(records: &[StaticRecord], k: usize) -> Result<Self> {
        let events: Vec<f64> = records
            .iter()
            .filter(|r| r.event)
            .map(|r| r.observed_time)
            .collect();
        Self::from_event_times(&events, k)
    }

    /// Number of intervals `K` (boundaries + 1).
    pub fn intervals(&self) -> usize {
        self.boundaries.len() + 1
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// `t_k` for `k` in `0..=K`, with `t_0 = 0` and `t_K = +inf`.
    pub fn time(&self, k: usize) -> f64 {
        match k {
            0 => 0.0,
            k if k < self.intervals() => self.boundaries[k - 1],
            k if k == self.intervals() => f64::INFINITY,
            _ => panic!("boundary index {k} out of range for K = {}", self.intervals()),
        }
    }
}

/// The label `1(T <= t)` if it is observed for this record, `None` otherwise.
///
/// With a known censoring time the label is observed exactly when `t < C`.
/// Without one, `t < Z` gives label 0, an event with `Z <= t` gives label 1,
/// and a censored record with `Z <= t` is unobserved.
pub fn observed_label(observed_time: f64, event: bool, censor_time: Option<f64>, t: f64) -> Option<bool> {
    match censor_time {
        Some(c) => (t < c).then_some(event && observed_time <= t),
        None if t < observed_time => Some(false),
        None if event => Some(true),
        None => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticExample {
    pub covariates: Vec<f64>,
    pub boundary_time: f64,
    pub boundary_index: usize,
    pub label: bool,
    pub subject_index: usize,
}

impl StaticExample {
    /// Classifier input `(x, t_k)`.
    pub fn features(&self) -> Vec<f64> {
        static_features(&self.covariates, self.boundary_time)
    }
}

pub(crate) fn static_features(covariates: &[f64], t: f64) -> Vec<f64> {
    let mut row = Vec::with_capacity(covariates.len() + 1);
    row.extend_from_slice(covariates);
    row.push(t);
    row
}

/// One example per observed `(record, k)` pair, ordered by subject then `k`.
pub fn expand_static(records: &[StaticRecord], grid: &Grid) -> Vec<StaticExample> {
    let mut out = Vec::new();
    for (i, r) in records.iter().enumerate() {
        for (k, &t) in grid.boundaries().iter().enumerate() {
            if let Some(label) = observed_label(r.observed_time, r.event, r.censor_time, t) {
                out.push(StaticExample {
                    covariates: r.covariates.clone(),
                    boundary_time: t,
                    boundary_index: k + 1,
                    label,
                    subject_index: i,
                });
            }
        }
    }
    out
}

/// Examples for discrete-hazard training: the static expansion restricted
/// to subjects still at risk at the start of each interval (`t_{k-1} < Z`),
/// so label 1 marks an event inside `(t_{k-1}, t_k]`.
pub fn expand_hazard(records: &[StaticRecord], grid: &Grid) -> Vec<StaticExample> {
    expand_static(records, grid)
        .into_iter()
        .filter(|ex| grid.time(ex.boundary_index - 1) < records[ex.subject_index].observed_time)
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureOptions {
    pub include_time_since_last: bool,
    pub include_horizon_index: bool,
}

impl FeatureOptions {
    pub const ALL: [FeatureOptions; 4] = [
        FeatureOptions { include_time_since_last: false, include_horizon_index: false },
        FeatureOptions { include_time_since_last: true, include_horizon_index: false },
        FeatureOptions { include_time_since_last: false, include_horizon_index: true },
        FeatureOptions { include_time_since_last: true, include_horizon_index: true },
    ];

    pub fn label(&self) -> &'static str {
        match (self.include_time_since_last, self.include_horizon_index) {
            (false, false) => "base",
            (true, false) => "elapsed",
            (false, true) => "horizon",
            (true, true) => "full",
        }
    }

    /// Length of the feature vector for covariate dimension `dim`.
    pub fn width(&self, dim: usize) -> usize {
        2 * dim + 2 + self.include_time_since_last as usize + self.include_horizon_index as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicExample {
    pub features: Vec<f64>,
    pub origin_index: usize,
    pub horizon_index: usize,
    pub label: bool,
    pub subject_index: usize,
}

/// History representation at origin `t_k` for predicting at `t_horizon`:
/// `[LOCF covariates, running mean, t_k, t_horizon]`, optionally followed by
/// the time since the last observation and the horizon index.
pub fn featurize_dynamic(
    record: &DynamicRecord,
    grid: &Grid,
    k: usize,
    horizon: usize,
    options: FeatureOptions,
) -> Result<Vec<f64>> {
    let last = grid.intervals() - 1;
    if horizon <= k || horizon > last {
        return Err(Error::InvalidInput(format!(
            "horizon {horizon} must lie in ({k}, {last}]"
        )));
    }
    let t_k = grid.time(k);
    let history = record.history(t_k);
    let latest = history.last().ok_or_else(|| {
        Error::InvalidInput(format!("subject {} has no observation by t = {t_k}", record.subject_id))
    })?;
    let dim = latest.covariates.len();
    let mut row = Vec::with_capacity(options.width(dim));
    row.extend_from_slice(&latest.covariates);
    let count = history.len() as f64;
    for j in 0..dim {
        row.push(history.iter().map(|o| o.covariates[j]).sum::<f64>() / count);
    }
    row.push(t_k);
    row.push(grid.time(horizon));
    if options.include_time_since_last {
        row.push(t_k - latest.time);
    }
    if options.include_horizon_index {
        row.push(horizon as f64);
    }
    Ok(row)
}

/// Landmark expansion: for every origin `k` in `0..=K-2` with `t_k < Z` and
/// every later boundary whose label is observed, one example. Ordered by
/// subject, origin, horizon.
pub fn expand_dynamic(
    records: &[DynamicRecord],
    grid: &Grid,
    options: FeatureOptions,
) -> Result<Vec<DynamicExample>> {
    let last = grid.intervals() - 1;
    let mut out = Vec::new();
    for (i, r) in records.iter().enumerate() {
        for k in 0..last {
            if grid.time(k) >= r.observed_time {
                break;
            }
            for h in k + 1..=last {
                if let Some(label) = observed_label(r.observed_time, r.event, r.censor_time, grid.time(h)) {
                    out.push(DynamicExample {
                        features: featurize_dynamic(r, grid, k, h, options)?,
                        origin_index: k,
                        horizon_index: h,
                        label,
                        subject_index: i,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Stacks feature rows into a matrix. Rows must share a width.
pub fn to_matrix<R: AsRef<[f64]>>(rows: &[R]) -> Result<Array2<f64>> {
    let width = rows.first().map_or(0, |r| r.as_ref().len());
    let mut data = Vec::with_capacity(rows.len() * width);
    for r in rows {
        let r = r.as_ref();
        if r.len() != width {
            return Err(Error::InvalidInput("feature rows differ in width".into()));
        }
        data.extend_from_slice(r);
    }
    Array2::from_shape_vec((rows.len(), width), data).map_err(|e| Error::InvalidInput(e.to_string()))
}

pub fn static_design(examples: &[StaticExample]) -> Result<(Array2<f64>, Vec<bool>)> {
    let rows: Vec<Vec<f64>> = examples.iter().map(StaticExample::features).collect();
    Ok((to_matrix(&rows)?, examples.iter().map(|e| e.label).collect()))
}

pub fn dynamic_design(examples: &[DynamicExample]) -> Result<(Array2<f64>, Vec<bool>)> {
    let rows: Vec<&[f64]> = examples.iter().map(|e| e.features.as_slice()).collect();
    Ok((to_matrix(&rows)?, examples.iter().map(|e| e.label).collect()))
}
