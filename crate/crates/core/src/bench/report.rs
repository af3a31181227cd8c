use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::experiment::{higher_is_better, ResultsTable, CINDEX, CLASSIFICATION_AUC, IBS, TEST_BCE};
use crate::error::{Error, Result};
use crate::metrics::{average_rank, elo_ratings, EloConfig, ScoreTable};

/// Pairs of metrics whose agreement across (dataset, model) points is reported.
pub const CORRELATION_PAIRS: [(&str, &str); 2] = [(TEST_BCE, IBS), (CLASSIFICATION_AUC, CINDEX)];

/// One metric of one model on one dataset, averaged over K (and origins).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetScore {
    pub dataset: String,
    pub model: String,
    pub metric: String,
    pub value: Option<f64>,
    /// Number of non-null cells averaged.
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub metric: String,
    pub model: String,
    pub mean: Option<f64>,
    pub std_error: Option<f64>,
    pub n_datasets: usize,
    /// Set when only one dataset contributed, in which case `std_error` is 0.
    pub single_dataset: bool,
    pub avg_rank: Option<f64>,
    pub elo: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub x: String,
    pub y: String,
    pub n: usize,
    pub pearson_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub per_dataset: Vec<DatasetScore>,
    pub aggregate: Vec<AggregateRow>,
    pub correlation: Vec<CorrelationRow>,
}

/// Averages each (dataset, model, metric) over its cells. With `k` set, only
/// cells with that requested K count.
pub fn per_dataset(tables: &[ResultsTable], k: Option<usize>) -> Result<Vec<DatasetScore>> {
    let mut sums: BTreeMap<(String, String, String), (f64, usize)> = BTreeMap::new();
    for row in tables.iter().flat_map(|t| &t.rows) {
        if k.is_some_and(|k| k != row.k) {
            continue;
        }
        let slot = sums
            .entry((row.dataset.clone(), row.model.clone(), row.metric.clone()))
            .or_insert((0.0, 0));
        if let Some(v) = row.value {
            slot.0 += v;
            slot.1 += 1;
        }
    }
    if sums.is_empty() {
        return Err(Error::InvalidInput("no result rows to report".into()));
    }
    Ok(sums
        .into_iter()
        .map(|((dataset, model, metric), (sum, n))| DatasetScore {
            dataset,
            model,
            metric,
            value: (n > 0).then(|| sum / n as f64),
            n,
        })
        .collect())
}

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

fn metric_table(scores: &[DatasetScore], metric: &str) -> BTreeMap<String, BTreeMap<String, f64>> {
    let mut t: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for s in scores.iter().filter(|s| s.metric == metric) {
        if let Some(v) = s.value {
            t.entry(s.dataset.clone()).or_default().insert(s.model.clone(), v);
        }
    }
    t
}

/// Mean and standard error over datasets, then average rank and Elo over
/// the datasets on which every model has a value.
pub fn aggregate(scores: &[DatasetScore]) -> Result<Vec<AggregateRow>> {
    if scores.is_empty() {
        return Err(Error::InvalidInput("no per-dataset scores".into()));
    }
    let metrics: BTreeSet<&str> = scores.iter().map(|s| s.metric.as_str()).collect();
    let models: BTreeSet<&str> = scores.iter().map(|s| s.model.as_str()).collect();
    let mut out = Vec::new();
    for metric in metrics {
        let table = metric_table(scores, metric);
        let complete: ScoreTable = table
            .iter()
            .filter(|(_, row)| models.iter().all(|m| row.contains_key(*m)))
            .map(|(d, row)| (d.clone(), row.clone()))
            .collect();
        let higher = higher_is_better(metric);
        let ranks = if complete.is_empty() { None } else { average_rank(&complete, higher).ok() };
        let elo = if complete.is_empty() || models.len() < 2 {
            None
        } else {
            elo_ratings(&complete, higher, &EloConfig::default()).ok()
        };
        for &model in &models {
            let values: Vec<f64> = table.values().filter_map(|row| row.get(model).copied()).collect();
            let n = values.len();
            let mean = (n > 0).then(|| values.iter().sum::<f64>() / n as f64);
            let std_error = mean.map(|m| {
                if n < 2 {
                    0.0
                } else {
                    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
                    (var / n as f64).sqrt()
                }
            });
            out.push(AggregateRow {
                metric: metric.to_owned(),
                model: model.to_owned(),
                mean,
                std_error,
                n_datasets: n,
                single_dataset: n == 1,
                avg_rank: ranks.as_ref().map(|r| r[model]),
                elo: elo.as_ref().map(|r| r[model]),
            });
        }
    }
    Ok(out)
}

/// Pearson correlation across (dataset, model) points having both metrics.
pub fn correlations(scores: &[DatasetScore]) -> Vec<CorrelationRow> {
    let lookup: BTreeMap<(&str, &str, &str), f64> = scores
        .iter()
        .filter_map(|s| s.value.map(|v| ((s.dataset.as_str(), s.model.as_str(), s.metric.as_str()), v)))
        .collect();
    let points: BTreeSet<(&str, &str)> = scores.iter().map(|s| (s.dataset.as_str(), s.model.as_str())).collect();
    CORRELATION_PAIRS
        .iter()
        .map(|&(x, y)| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = points
                .iter()
                .filter_map(|&(d, m)| Some((*lookup.get(&(d, m, x))?, *lookup.get(&(d, m, y))?)))
                .unzip();
            CorrelationRow {
                x: x.to_owned(),
                y: y.to_owned(),
                n: xs.len(),
                pearson_r: pearson(&xs, &ys),
            }
        })
        .collect()
}

pub fn report(tables: &[ResultsTable], k: Option<usize>) -> Result<Report> {
    let per_dataset = per_dataset(tables, k)?;
    report_from_scores(per_dataset)
}

/// The aggregate and correlation tables depend only on the per-dataset
/// scores, so a saved `per_dataset.csv` regenerates them.
pub fn report_from_scores(per_dataset: Vec<DatasetScore>) -> Result<Report> {
    let aggregate = aggregate(&per_dataset)?;
    let correlation = correlations(&per_dataset);
    Ok(Report {
        per_dataset,
        aggregate,
        correlation,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub fn write_per_dataset(scores: &[DatasetScore], writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["dataset", "model", "metric", "value", "n"])?;
    for s in scores {
        w.write_record([s.dataset.clone(), s.model.clone(), s.metric.clone(), opt(s.value), s.n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_per_dataset(reader: impl Read) -> Result<Vec<DatasetScore>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 5 {
            return Err(Error::data(i + 1, format!("expected 5 columns, found {}", rec.len())));
        }
        let value = if rec[3].is_empty() {
            None
        } else {
            Some(rec[3].parse().map_err(|_| Error::data(i + 1, format!("bad value {:?}", &rec[3])))?)
        };
        out.push(DatasetScore {
            dataset: rec[0].to_owned(),
            model: rec[1].to_owned(),
            metric: rec[2].to_owned(),
            value,
            n: rec[4].parse().map_err(|_| Error::data(i + 1, format!("bad count {:?}", &rec[4])))?,
        });
    }
    Ok(out)
}

impl Report {
    /// Writes `per_dataset.csv`, `aggregate.csv` and `correlation.csv`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        write_per_dataset(&self.per_dataset, std::fs::File::create(dir.join("per_dataset.csv"))?)?;

        let mut w = csv::Writer::from_path(dir.join("aggregate.csv"))?;
        w.write_record(["metric", "model", "mean", "std_error", "n_datasets", "single_dataset", "avg_rank", "elo"])?;
        for r in &self.aggregate {
            w.write_record([
                r.metric.clone(),
                r.model.clone(),
                opt(r.mean),
                opt(r.std_error),
                r.n_datasets.to_string(),
                r.single_dataset.to_string(),
                opt(r.avg_rank),
                opt(r.elo),
            ])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("correlation.csv"))?;
        w.write_record(["x", "y", "n", "pearson_r"])?;
        for r in &self.correlation {
            w.write_record([r.x.clone(), r.y.clone(), r.n.to_string(), opt(r.pearson_r)])?;
        }
        w.flush()?;
        Ok(())
    }
}
