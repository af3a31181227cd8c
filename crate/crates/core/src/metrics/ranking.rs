use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-dataset, per-model scalar scores.
pub type ScoreTable = BTreeMap<String, BTreeMap<String, f64>>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EloConfig {
    pub initial_rating: f64,
    pub k_factor: f64,
}

impl Default for EloConfig {
    fn default() -> Self {
        Self {
            initial_rating: 1000.0,
            k_factor: 32.0,
        }
    }
}

pub fn expected_score(rating: f64, opponent: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf((opponent - rating) / 400.0))
}

/// Every model in `table`, checking that each dataset scores all of them.
fn models(table: &ScoreTable) -> Result<Vec<String>> {
    let all: BTreeSet<&String> = table.values().flat_map(|row| row.keys()).collect();
    for (dataset, row) in table {
        if let Some(missing) = all.iter().find(|m| !row.contains_key(**m)) {
            return Err(Error::InvalidInput(format!("dataset {dataset} has no score for model {missing}")));
        }
        if let Some((m, _)) = row.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("dataset {dataset} has a non-finite score for {m}")));
        }
    }
    Ok(all.into_iter().cloned().collect())
}

/// One Elo arena per dataset, a single round-robin over model pairs in
/// lexicographic order, then the mean rating across arenas.
pub fn elo_ratings(table: &ScoreTable, higher_is_better: bool, config: &EloConfig) -> Result<BTreeMap<String, f64>> {
    let names = models(table)?;
    if names.len() < 2 {
        return Err(Error::InvalidInput("Elo needs at least two models".into()));
    }
    if table.is_empty() {
        return Err(Error::InvalidInput("Elo needs at least one dataset".into()));
    }
    let mut totals = vec![0.0; names.len()];
    for row in table.values() {
        let ratings = elo_arena(&names.iter().map(|m| row[m]).collect::<Vec<_>>(), higher_is_better, config);
        for (t, r) in totals.iter_mut().zip(ratings) {
            *t += r;
        }
    }
    Ok(names
        .into_iter()
        .zip(totals)
        .map(|(m, t)| (m, t / table.len() as f64))
        .collect())
}

/// Ratings after one round-robin arena over `scores` (models in the given order).
pub fn elo_arena(scores: &[f64], higher_is_better: bool, config: &EloConfig) -> Vec<f64> {
    let mut ratings = vec![config.initial_rating; scores.len()];
    for a in 0..scores.len() {
        for b in a + 1..scores.len() {
            let (sa, sb) = if higher_is_better { (scores[a], scores[b]) } else { (-scores[a], -scores[b]) };
            let outcome = if sa > sb {
                1.0
            } else if sa < sb {
                0.0
            } else {
                0.5
            };
            let expected = expected_score(ratings[a], ratings[b]);
            let delta = config.k_factor * (outcome - expected);
            ratings[a] += delta;
            ratings[b] -= delta;
        }
    }
    ratings
}

/// Mean rank (1 = best, ties share the mean rank) across datasets.
pub fn average_rank(table: &ScoreTable, higher_is_better: bool) -> Result<BTreeMap<String, f64>> {
    let names = models(table)?;
    if table.is_empty() {
        return Err(Error::InvalidInput("ranking needs at least one dataset".into()));
    }
    let mut totals = vec![0.0; names.len()];
    for row in table.values() {
        let oriented: Vec<f64> = names
            .iter()
            .map(|m| if higher_is_better { -row[m] } else { row[m] })
            .collect();
        for (t, r) in totals.iter_mut().zip(mid_ranks(&oriented)) {
            *t += r;
        }
    }
    Ok(names
        .into_iter()
        .zip(totals)
        .map(|(m, t)| (m, t / table.len() as f64))
        .collect())
}

/// Ascending ranks starting at 1, ties averaged.
fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &p in &order[i..=j] {
            ranks[p] = mid;
        }
        i = j + 1;
    }
    ranks
}
