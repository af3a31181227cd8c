use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Right-continuous nonincreasing step function starting at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    jump_times: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(jump_times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if jump_times.len() != values.len() {
            return Err(Error::InvalidInput("jump times and values differ in length".into()));
        }
        if jump_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("jump times must be strictly increasing".into()));
        }
        let mut prev = 1.0;
        for &v in &values {
            if !(0.0..=prev).contains(&v) {
                return Err(Error::InvalidInput("step values must be nonincreasing in [0, 1]".into()));
            }
            prev = v;
        }
        Ok(Self { jump_times, values })
    }

    /// The constant function 1.
    pub fn one() -> Self {
        Self {
            jump_times: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at `t`, including a jump at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.jump_times.partition_point(|&x| x <= t);
        if i == 0 {
            1.0
        } else {
            self.values[i - 1]
        }
    }

    /// Limit from the left at `t`, excluding a jump at `t`.
    pub fn left_limit(&self, t: f64) -> f64 {
        let i = self.jump_times.partition_point(|&x| x < t);
        if i == 0 {
            1.0
        } else {
            self.values[i - 1]
        }
    }
}

/// Product-limit estimate of `P(T > t)` from right-censored data.
pub fn kaplan_meier(times: &[f64], events: &[bool]) -> Result<StepFunction> {
    if times.is_empty() {
        return Err(Error::InvalidInput("kaplan-meier needs at least one observation".into()));
    }
    if times.len() != events.len() {
        return Err(Error::InvalidInput("times and events differ in length".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t <= 0.0) {
        return Err(Error::InvalidInput("times must be finite and positive".into()));
    }
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let mut at_risk = times.len();
    let mut survival = 1.0;
    let mut jump_times = Vec::new();
    let mut values = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let t = times[order[i]];
        let mut j = i;
        let mut deaths = 0usize;
        while j < order.len() && times[order[j]] == t {
            deaths += events[order[j]] as usize;
            j += 1;
        }
        if deaths > 0 {
            survival *= 1.0 - deaths as f64 / at_risk as f64;
            jump_times.push(t);
            values.push(survival);
        }
        at_risk -= j - i;
        i = j;
    }
    Ok(StepFunction { jump_times, values })
}

/// Kaplan-Meier estimate of the censoring survival `G(t) = P(C > t)`,
/// treating censorings as the events.
pub fn censoring_km(times: &[f64], events: &[bool]) -> Result<StepFunction> {
    let flipped: Vec<bool> = events.iter().map(|e| !e).collect();
    kaplan_meier(times, &flipped)
}

/// `G(u | t) = G(u) / G(t)` for `u >= t`.
pub fn conditional_censoring(g: &StepFunction, t: f64, u: f64) -> Result<f64> {
    let base = g.eval(t);
    if base <= 0.0 {
        return Err(Error::NoCensoringSupport(t));
    }
    Ok(g.eval(u) / base)
}
