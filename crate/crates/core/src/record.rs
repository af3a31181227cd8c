//! Censored time-to-event observations.
//!
//! A record stores the observable pair `(observed_time, event)` where
//! `observed_time = min(T, C)` and `event = (T <= C)`. When the censoring
//! time is known for every subject (administrative end of follow-up, or
//! synthetic data) it can be attached with `with_censor_time`, which lets
//! expansion decide label observability from `C` directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticRecord {
    pub covariates: Vec<f64>,
    pub observed_time: f64,
    pub event: bool,
    /// Potential censoring time `C`, `+inf` when never censored.
    pub censor_time: Option<f64>,
}

impl StaticRecord {
    pub fn new(covariates: Vec<f64>, observed_time: f64, event: bool) -> Result<Self> {
        check_time(observed_time)?;
        if covariates.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("covariates"));
        }
        Ok(Self {
            covariates,
            observed_time,
            event,
            censor_time: None,
        })
    }

    pub fn with_censor_time(mut self, censor_time: f64) -> Result<Self> {
        check_censor_time(self.observed_time, self.event, censor_time)?;
        self.censor_time = Some(censor_time);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.covariates.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub time: f64,
    pub covariates: Vec<f64>,
}

/// A subject with a timestamped covariate history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicRecord {
    pub subject_id: String,
    pub observations: Vec<Observation>,
    pub observed_time: f64,
    pub event: bool,
    pub censor_time: Option<f64>,
}

impl DynamicRecord {
    /// Validates the history: a baseline observation at time 0, strictly
    /// increasing observation times, none after `observed_time`, and a
    /// constant covariate dimension.
    pub fn new(
        subject_id: impl Into<String>,
        observations: Vec<Observation>,
        observed_time: f64,
        event: bool,
    ) -> Result<Self> {
        let subject_id = subject_id.into();
        check_time(observed_time)?;
        let first = observations.first().ok_or_else(|| {
            Error::InvalidInput(format!("subject {subject_id} has no observations"))
        })?;
        if first.time != 0.0 {
            return Err(Error::InvalidInput(format!(
                "subject {subject_id}: first observation must be at time 0, got {}",
                first.time
            )));
        }
        let dim = first.covariates.len();
        for pair in observations.windows(2) {
            if !(pair[1].time > pair[0].time) {
                return Err(Error::InvalidInput(format!(
                    "subject {subject_id}: observation times must be strictly increasing"
                )));
            }
        }
        for obs in &observations {
            if obs.covariates.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "subject {subject_id}: covariate dimension changes over time"
                )));
            }
            if obs.covariates.iter().any(|v| !v.is_finite()) || !obs.time.is_finite() {
                return Err(Error::NonFinite("observations"));
            }
            if obs.time > observed_time {
                return Err(Error::InvalidInput(format!(
                    "subject {subject_id}: observation at {} after observed time {observed_time}",
                    obs.time
                )));
            }
        }
        Ok(Self {
            subject_id,
            observations,
            observed_time,
            event,
            censor_time: None,
        })
    }

    pub fn with_censor_time(mut self, censor_time: f64) -> Result<Self> {
        check_censor_time(self.observed_time, self.event, censor_time)?;
        self.censor_time = Some(censor_time);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.observations[0].covariates.len()
    }

    /// Observations with `time <= t`, in time order.
    pub fn history(&self, t: f64) -> &[Observation] {
        let end = self.observations.partition_point(|o| o.time <= t);
        &self.observations[..end]
    }

    /// Baseline covariates and outcome, dropping the history.
    pub fn to_static(&self) -> StaticRecord {
        StaticRecord {
            covariates: self.observations[0].covariates.clone(),
            observed_time: self.observed_time,
            event: self.event,
            censor_time: self.censor_time,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::NonFinite("observed_time"));
    }
    if t <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "observed time must be positive, got {t}"
        )));
    }
    Ok(())
}

fn check_censor_time(observed_time: f64, event: bool, censor_time: f64) -> Result<()> {
    if censor_time.is_nan() {
        return Err(Error::NonFinite("censor_time"));
    }
    let consistent = if event {
        censor_time >= observed_time
    } else {
        censor_time == observed_time
    };
    if !consistent {
        return Err(Error::InvalidInput(format!(
            "censor time {censor_time} inconsistent with observed time {observed_time} (event = {event})"
        )));
    }
    Ok(())
}
