//! Synthetic censored data with known ground truth.
//!
//! Randomness comes from ChaCha8 seeded with the user seed; subject `i`
//! draws from stream `i` of that generator, so records do not depend on
//! generation order or thread count.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::record::{DynamicRecord, Observation, StaticRecord};

/// Random stream for subject `index`.
pub fn subject_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Finite-support law with event times on the grid boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteTruth {
    pub boundaries: Vec<f64>,
    pub support: Vec<Vec<f64>>,
    /// `cdf[x][k-1] = P(T <= t_k | x)`; the rest of the mass lies past `t_{K-1}`.
    pub cdf: Vec<Vec<f64>>,
    /// `censor_probs[j-1] = P(C in (t_{j-1}, t_j))`; the rest is never censored.
    pub censor_probs: Vec<f64>,
}

impl DiscreteTruth {
    /// Four covariate cells (two binary covariates) on `K = 4`.
    pub fn four_cell() -> Self {
        Self {
            boundaries: vec![1.0, 2.0, 3.0],
            support: vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]],
            cdf: vec![
                vec![0.10, 0.30, 0.50],
                vec![0.20, 0.45, 0.70],
                vec![0.30, 0.60, 0.85],
                vec![0.15, 0.25, 0.40],
            ],
            censor_probs: vec![0.10, 0.15, 0.15],
        }
    }

    pub fn validate(&self) -> Result<Grid> {
        let grid = Grid::new(self.boundaries.clone())?;
        let m = self.boundaries.len();
        if self.support.is_empty() || self.support.len() != self.cdf.len() {
            return Err(Error::InvalidInput("support and cdf table must be nonempty and aligned".into()));
        }
        let dim = self.support[0].len();
        if self.support.iter().any(|x| x.len() != dim) {
            return Err(Error::InvalidInput("support rows differ in dimension".into()));
        }
        for row in &self.cdf {
            if row.len() != m {
                return Err(Error::InvalidInput(format!("cdf rows need {m} values")));
            }
            let mut prev = 0.0;
            for &p in row {
                if !(prev..=1.0).contains(&p) {
                    return Err(Error::InvalidInput("cdf rows must be nondecreasing in [0, 1]".into()));
                }
                prev = p;
            }
        }
        check_censor_probs(&self.censor_probs, m)?;
        Ok(grid)
    }

    pub fn grid(&self) -> Result<Grid> {
        self.validate()
    }

    fn cell(&self, x: &[f64]) -> Result<usize> {
        self.support
            .iter()
            .position(|s| s.as_slice() == x)
            .ok_or_else(|| Error::InvalidInput(format!("{x:?} is not in the support")))
    }
}

/// `P(T > t_k | x)`, with `k = 0` giving 1.
pub fn true_survival(truth: &DiscreteTruth, x: &[f64], k: usize) -> Result<f64> {
    let cell = truth.cell(x)?;
    match k {
        0 => Ok(1.0),
        k if k <= truth.boundaries.len() => Ok(1.0 - truth.cdf[cell][k - 1]),
        _ => Err(Error::InvalidInput(format!("boundary index {k} out of range"))),
    }
}

fn check_censor_probs(probs: &[f64], m: usize) -> Result<()> {
    if probs.len() != m {
        return Err(Error::InvalidInput(format!("censoring table needs {m} values")));
    }
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || probs.iter().sum::<f64>() > 1.0 + 1e-12 {
        return Err(Error::InvalidInput("censoring probabilities must lie in [0, 1] and sum to at most 1".into()));
    }
    Ok(())
}

/// Event time for interval index `k` (1-based): the boundary `t_k`, or one
/// interval width past the last boundary for the open interval.
fn event_time(boundaries: &[f64], k: usize) -> f64 {
    match boundaries.get(k - 1) {
        Some(&t) => t,
        None => {
            let last = boundaries[boundaries.len() - 1];
            let prev = if boundaries.len() > 1 { boundaries[boundaries.len() - 2] } else { 0.0 };
            2.0 * last - prev
        }
    }
}

/// Censoring time drawn from `censor_probs`: the midpoint of the chosen
/// interval, or `+inf`.
fn draw_censoring(rng: &mut ChaCha8Rng, boundaries: &[f64], censor_probs: &[f64]) -> f64 {
    let v: f64 = rng.random();
    let mut acc = 0.0;
    for (j, &p) in censor_probs.iter().enumerate() {
        acc += p;
        if v < acc {
            let lo = if j == 0 { 0.0 } else { boundaries[j - 1] };
            return 0.5 * (lo + boundaries[j]);
        }
    }
    f64::INFINITY
}

fn outcome(t: f64, c: f64) -> (f64, bool) {
    if t <= c {
        (t, true)
    } else {
        (c, false)
    }
}

pub fn gen_discrete(truth: &DiscreteTruth, n: usize, seed: u64) -> Result<Vec<StaticRecord>> {
    truth.validate()?;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = subject_rng(seed, i as u64);
            let cell = rng.random_range(0..truth.support.len());
            let u: f64 = rng.random();
            let k = truth.cdf[cell].iter().position(|&f| u < f).map_or(truth.boundaries.len() + 1, |k| k + 1);
            let t = event_time(&truth.boundaries, k);
            let c = draw_censoring(&mut rng, &truth.boundaries, &truth.censor_probs);
            let (z, event) = outcome(t, c);
            StaticRecord::new(truth.support[cell].clone(), z, event)?.with_censor_time(c)
        })
        .collect()
}

/// Weibull proportional-hazards law: `S(t | x) = exp(-(t / scale)^shape)`
/// with `scale = exp(-x.beta / shape)`, and exponential censoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeibullTruth {
    pub coefficients: Vec<f64>,
    pub shape: f64,
    pub censor_rate: f64,
}

impl WeibullTruth {
    pub fn scale(&self, x: &[f64]) -> f64 {
        let lp: f64 = x.iter().zip(&self.coefficients).map(|(a, b)| a * b).sum();
        (-lp / self.shape).exp()
    }

    pub fn survival(&self, x: &[f64], t: f64) -> f64 {
        (-(t / self.scale(x)).powf(self.shape)).exp()
    }
}

pub fn gen_weibull(truth: &WeibullTruth, n: usize, d: usize, seed: u64) -> Result<Vec<StaticRecord>> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidInput("n and d must be at least 1".into()));
    }
    if truth.coefficients.len() != d {
        return Err(Error::InvalidInput(format!(
            "{} coefficients for {d} covariates",
            truth.coefficients.len()
        )));
    }
    if !(truth.shape > 0.0) || !(truth.censor_rate > 0.0) {
        return Err(Error::InvalidInput("shape and censor_rate must be positive".into()));
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = subject_rng(seed, i as u64);
            let x: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let u: f64 = rng.sample(Open01);
            let t = truth.scale(&x) * (-u.ln()).powf(1.0 / truth.shape);
            let v: f64 = rng.sample(Open01);
            let c = -v.ln() / truth.censor_rate;
            let (z, event) = outcome(t, c);
            StaticRecord::new(x, z, event)?.with_censor_time(c)
        })
        .collect()
}

/// Latent-state law for histories: a subject's state fixes its covariate
/// trajectory at `observation_times` and its discrete hazards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicTruth {
    pub boundaries: Vec<f64>,
    pub state_probs: Vec<f64>,
    /// `hazards[z][k-1] = P(T = t_k | T > t_{k-1}, state z)`.
    pub hazards: Vec<Vec<f64>>,
    pub observation_times: Vec<f64>,
    /// `trajectories[z][j]` are the covariates observed at `observation_times[j]`.
    pub trajectories: Vec<Vec<Vec<f64>>>,
    pub censor_probs: Vec<f64>,
}

impl DynamicTruth {
    /// Two states on `K = 4`, observed at `0, t_1, t_2`.
    pub fn two_state() -> Self {
        Self {
            boundaries: vec![1.0, 2.0, 3.0],
            state_probs: vec![0.5, 0.5],
            hazards: vec![vec![0.10, 0.15, 0.20], vec![0.30, 0.35, 0.40]],
            observation_times: vec![0.0, 1.0, 2.0],
            trajectories: vec![
                vec![vec![0.0], vec![0.2], vec![0.4]],
                vec![vec![1.0], vec![1.5], vec![2.0]],
            ],
            censor_probs: vec![0.10, 0.10, 0.10],
        }
    }

    pub fn validate(&self) -> Result<Grid> {
        let grid = Grid::new(self.boundaries.clone())?;
        let m = self.boundaries.len();
        let states = self.state_probs.len();
        if states == 0 || self.hazards.len() != states || self.trajectories.len() != states {
            return Err(Error::InvalidInput("state tables must be nonempty and aligned".into()));
        }
        if self.state_probs.iter().any(|p| !(0.0..=1.0).contains(p))
            || (self.state_probs.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::InvalidInput("state probabilities must sum to 1".into()));
        }
        if self.hazards.iter().any(|h| h.len() != m || h.iter().any(|p| !(0.0..=1.0).contains(p))) {
            return Err(Error::InvalidInput(format!("each state needs {m} hazards in [0, 1]")));
        }
        if self.observation_times.first() != Some(&0.0)
            || self.observation_times.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidInput("observation times must start at 0 and increase".into()));
        }
        let dim = self.trajectories[0].first().map_or(0, Vec::len);
        for traj in &self.trajectories {
            if traj.len() != self.observation_times.len() || traj.iter().any(|x| x.len() != dim) {
                return Err(Error::InvalidInput("trajectories must cover every observation time".into()));
            }
        }
        check_censor_probs(&self.censor_probs, m)?;
        Ok(grid)
    }

    /// `P(T > t_{k+delta} | T > t_k, state)`.
    pub fn conditional_survival(&self, state: usize, k: usize, delta: usize) -> f64 {
        self.hazards[state][k..k + delta].iter().map(|h| 1.0 - h).product()
    }
}

#[derive(Debug, Clone)]
pub struct DynamicSample {
    pub records: Vec<DynamicRecord>,
    pub states: Vec<usize>,
}

pub fn gen_dynamic(truth: &DynamicTruth, n: usize, seed: u64) -> Result<DynamicSample> {
    truth.validate()?;
    let m = truth.boundaries.len();
    let drawn: Result<Vec<(DynamicRecord, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = subject_rng(seed, i as u64);
            let w: f64 = rng.random();
            let mut acc = 0.0;
            let state = truth
                .state_probs
                .iter()
                .position(|&p| {
                    acc += p;
                    w < acc
                })
                .unwrap_or(truth.state_probs.len() - 1);
            let mut k = m + 1;
            for (j, &h) in truth.hazards[state].iter().enumerate() {
                if rng.random::<f64>() < h {
                    k = j + 1;
                    break;
                }
            }
            let t = event_time(&truth.boundaries, k);
            let c = draw_censoring(&mut rng, &truth.boundaries, &truth.censor_probs);
            let (z, event) = outcome(t, c);
            let observations = truth
                .observation_times
                .iter()
                .zip(&truth.trajectories[state])
                .filter(|(&s, _)| s <= z)
                .map(|(&time, x)| Observation { time, covariates: x.clone() })
                .collect();
            let record = DynamicRecord::new(format!("s{i}"), observations, z, event)?.with_censor_time(c)?;
            Ok((record, state))
        })
        .collect();
    let (records, states) = drawn?.into_iter().unzip();
    Ok(DynamicSample { records, states })
}
