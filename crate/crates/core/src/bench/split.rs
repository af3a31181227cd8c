use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::StepFunction;

/// Train, validation and test index sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

pub fn check_ratios(ratios: [f64; 3]) -> Result<()> {
    if ratios.iter().any(|r| !r.is_finite() || *r < 0.0) || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("split ratios {ratios:?} must be nonnegative and sum to 1")));
    }
    Ok(())
}

/// Largest-remainder apportionment of `n` items; ties in the remainder go
/// to the earlier split.
pub fn allocate(n: usize, ratios: [f64; 3]) -> [usize; 3] {
    let quotas = ratios.map(|r| r * n as f64);
    let mut counts = quotas.map(|q| q.floor() as usize);
    let mut left = n.saturating_sub(counts.iter().sum::<usize>());
    let mut order = [0, 1, 2];
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &j in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[j] += 1;
        left -= 1;
    }
    counts
}

/// Stratified on the event indicator: event and censored indices are
/// shuffled separately and each stratum is apportioned on its own.
pub fn split_stratified(events: &[bool], ratios: [f64; 3], seed: u64) -> Result<Splits> {
    if events.is_empty() {
        return Err(Error::InvalidInput("cannot split an empty dataset".into()));
    }
    check_ratios(ratios)?;
    let mut splits = Splits {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
    };
    for (stream, flag) in [(0, true), (1, false)] {
        let mut stratum: Vec<usize> = (0..events.len()).filter(|&i| events[i] == flag).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        stratum.shuffle(&mut rng);
        let [a, b, _] = allocate(stratum.len(), ratios);
        splits.train.extend_from_slice(&stratum[..a]);
        splits.validation.extend_from_slice(&stratum[a..a + b]);
        splits.test.extend_from_slice(&stratum[a + b..]);
    }
    splits.train.sort_unstable();
    splits.validation.sort_unstable();
    splits.test.sort_unstable();
    Ok(splits)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub reasons: Vec<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.reasons.is_empty()
    }
}

/// Checks that a split can be evaluated on `boundaries`: the test side needs
/// two distinct event times and the training censoring estimate must stay
/// positive at every boundary.
pub fn validate_dataset(test_times: &[f64], test_events: &[bool], boundaries: &[f64], censoring: &StepFunction) -> Verdict {
    let mut reasons = Vec::new();
    let mut event_times: Vec<f64> = test_times
        .iter()
        .zip(test_events)
        .filter(|(_, &e)| e)
        .map(|(&t, _)| t)
        .collect();
    event_times.sort_by(f64::total_cmp);
    event_times.dedup();
    if event_times.len() < 2 {
        reasons.push(format!("test split has {} unique event times, need 2", event_times.len()));
    }
    if let Some(&t) = boundaries.iter().find(|&&t| censoring.eval(t) <= 0.0) {
        reasons.push(format!("censoring support ends before boundary t = {t}"));
    }
    Verdict { reasons }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn largest_remainder_example() {
        assert_eq!(allocate(8, [0.7, 0.15, 0.15]), [6, 1, 1]);
        assert_eq!(allocate(12, [0.7, 0.15, 0.15]), [8, 2, 2]);
        let mut events = vec![true; 8];
        events.extend([false; 12]);
        let s = split_stratified(&events, [0.7, 0.15, 0.15], 3).unwrap();
        let train_events = s.train.iter().filter(|&&i| events[i]).count();
        assert_eq!((train_events, s.train.len() - train_events), (6, 8));
    }

    #[test]
    fn remainder_ties_prefer_earlier_split() {
        // quotas 0.5, 0.25, 0.25 of 1 item, then 1.0, 0.5, 0.5 of 2
        assert_eq!(allocate(1, [0.5, 0.25, 0.25]), [1, 0, 0]);
        assert_eq!(allocate(2, [0.5, 0.25, 0.25]), [1, 1, 0]);
        assert_eq!(allocate(3, [1.0 / 3.0; 3]), [1, 1, 1]);
    }

    #[test]
    fn partition_properties() {
        let events: Vec<bool> = (0..37).map(|i| i % 3 == 0).collect();
        let s = split_stratified(&events, [0.7, 0.15, 0.15], 11).unwrap();
        let mut all: Vec<usize> = s.train.iter().chain(&s.validation).chain(&s.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..37).collect::<Vec<_>>());
        assert_eq!(s, split_stratified(&events, [0.7, 0.15, 0.15], 11).unwrap());
        assert_ne!(s, split_stratified(&events, [0.7, 0.15, 0.15], 12).unwrap());
    }

    #[test]
    fn everything_in_train() {
        let s = split_stratified(&[true, false, true], [1.0, 0.0, 0.0], 0).unwrap();
        assert_eq!(s.train, vec![0, 1, 2]);
        assert!(s.validation.is_empty() && s.test.is_empty());
    }

    #[test]
    fn split_errors() {
        assert!(split_stratified(&[], [0.7, 0.15, 0.15], 0).is_err());
        assert!(split_stratified(&[true], [0.7, 0.2, 0.2], 0).is_err());
    }

    #[test]
    fn verdicts() {
        let g = StepFunction::new(vec![2.0], vec![0.5]).unwrap();
        let v = validate_dataset(&[1.0, 1.0, 3.0], &[true, true, false], &[1.0, 2.0], &g);
        assert!(!v.passed());
        assert!(v.reasons[0].contains("unique event times"));
        assert!(validate_dataset(&[1.0, 2.0], &[true, true], &[1.0, 2.0], &g).passed());
        let dead = StepFunction::new(vec![2.0], vec![0.0]).unwrap();
        let v = validate_dataset(&[1.0, 2.0], &[true, true], &[1.0, 3.0], &dead);
        assert_eq!(v.reasons.len(), 1);
        assert!(v.reasons[0].contains("censoring support"));
    }
}
