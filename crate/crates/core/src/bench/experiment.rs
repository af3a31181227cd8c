use std::io::{Read, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use ndarray::{Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ModelSpec, Setting};
use super::io::{ingest_dynamic, ingest_static};
use super::preprocess::Preprocessor;
use super::split::{split_stratified, validate_dataset, Verdict};
use crate::classify::{checked_predict, classification_auc, mean_bce, Classifier};
use crate::error::{Error, Result};
use crate::grid::{
    dynamic_design, expand_dynamic, expand_hazard, expand_static, featurize_dynamic, static_design, static_features,
    to_matrix, FeatureOptions, Grid,
};
use crate::infer::{risk_dynamic, risk_static, survival_from_failure, survival_from_hazard, HazardCurve, SurvivalCurve, Target};
use crate::metrics::{censoring_km, dynamic_metrics, kaplan_meier, static_metrics, MetricConfig, StepFunction, SurvivalMetrics};
use crate::record::{DynamicRecord, StaticRecord};

pub const CINDEX: &str = "cindex";
pub const INTEGRATED_AUC: &str = "integrated_auc";
pub const IBS: &str = "ibs";
pub const TEST_BCE: &str = "test_bce";
pub const CLASSIFICATION_AUC: &str = "classification_auc";

/// Survival metrics first, then the classification metrics on expanded test rows.
pub const METRICS: [&str; 5] = [CINDEX, INTEGRATED_AUC, IBS, TEST_BCE, CLASSIFICATION_AUC];

pub fn higher_is_better(metric: &str) -> bool {
    !matches!(metric, IBS | TEST_BCE)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub dataset: String,
    pub model: String,
    /// Requested number of intervals.
    pub k: usize,
    /// Intervals after merging tied quantiles; empty when no grid was built.
    pub grid_k: Option<usize>,
    /// Landmark origin index for dynamic survival metrics.
    pub origin: Option<usize>,
    pub metric: String,
    pub value: Option<f64>,
    /// Why the value is missing, or which feature variant was selected.
    pub note: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultsTable {
    pub rows: Vec<ResultRow>,
}

impl ResultsTable {
    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["dataset", "model", "k", "grid_k", "origin", "metric", "value", "note"])?;
        let opt = |v: Option<usize>| v.map_or_else(String::new, |v| v.to_string());
        for r in &self.rows {
            w.write_record([
                r.dataset.clone(),
                r.model.clone(),
                r.k.to_string(),
                opt(r.grid_k),
                opt(r.origin),
                r.metric.clone(),
                r.value.map_or_else(String::new, |v| v.to_string()),
                r.note.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 8 {
                return Err(Error::data(i + 1, format!("expected 8 columns, found {}", rec.len())));
            }
            let int = |s: &str| -> Result<Option<usize>> {
                if s.is_empty() {
                    return Ok(None);
                }
                s.parse().map(Some).map_err(|_| Error::data(i + 1, format!("bad integer {s:?}")))
            };
            let value = if rec[6].is_empty() {
                None
            } else {
                Some(rec[6].parse::<f64>().map_err(|_| Error::data(i + 1, format!("bad value {:?}", &rec[6])))?)
            };
            rows.push(ResultRow {
                dataset: rec[0].to_owned(),
                model: rec[1].to_owned(),
                k: int(&rec[2])?.ok_or_else(|| Error::data(i + 1, "missing k"))?,
                grid_k: int(&rec[3])?,
                origin: int(&rec[4])?,
                metric: rec[5].to_owned(),
                value,
                note: rec[7].to_owned(),
            });
        }
        Ok(Self { rows })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellTiming {
    pub dataset: String,
    pub model: String,
    pub k: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub setting: Setting,
    pub datasets: Vec<String>,
    pub models: Vec<String>,
    pub k_values: Vec<usize>,
    pub jobs: usize,
    pub wall_seconds: f64,
    pub cells: Vec<CellTiming>,
    /// Cells whose model failed; their rows are null.
    pub failures: Vec<CellFailure>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellFailure {
    pub dataset: String,
    pub model: String,
    pub k: usize,
    pub reason: String,
    /// Command-line exit code class of the underlying error.
    pub exit_code: i32,
}

pub struct RunOutput {
    pub table: ResultsTable,
    pub manifest: Manifest,
}

impl RunOutput {
    /// Whether any cell failed inside a model or the external protocol.
    pub fn model_failed(&self) -> bool {
        self.manifest.failures.iter().any(|f| f.exit_code == 3)
    }

    /// Writes `results.csv` and `manifest.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        self.table.write_csv(std::fs::File::create(dir.join("results.csv"))?)?;
        let mut f = std::fs::File::create(dir.join("manifest.json"))?;
        serde_json::to_writer_pretty(&mut f, &self.manifest)?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

/// Mixes indices into a seed with the splitmix64 finalizer.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(seed, |acc, &p| {
        let mut z = acc ^ p.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    })
}

enum Records {
    Static(Vec<StaticRecord>),
    Dynamic(Vec<DynamicRecord>),
}

impl Records {
    fn outcomes(&self) -> (Vec<f64>, Vec<bool>) {
        match self {
            Records::Static(r) => (r.iter().map(|r| r.observed_time).collect(), r.iter().map(|r| r.event).collect()),
            Records::Dynamic(r) => (r.iter().map(|r| r.observed_time).collect(), r.iter().map(|r| r.event).collect()),
        }
    }
}

struct Prepared {
    name: String,
    train: Records,
    validation: Records,
    test: Records,
}

fn dataset_name(path: &Path, index: usize) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| format!("dataset{index}"))
}

fn prepare(config: &ExperimentConfig, index: usize, path: &Path) -> Result<Prepared> {
    let seed = derive_seed(config.seed, &[index as u64]);
    let name = dataset_name(path, index);
    match config.setting {
        Setting::Static => {
            let data = ingest_static(path)?;
            let splits = split_stratified(&data.events, config.split, seed)?;
            let pre = Preprocessor::fit(data.train_rows(&splits))?;
            Ok(Prepared {
                name,
                train: Records::Static(pre.apply_static(&data, &splits.train)?),
                validation: Records::Static(pre.apply_static(&data, &splits.validation)?),
                test: Records::Static(pre.apply_static(&data, &splits.test)?),
            })
        }
        Setting::Dynamic => {
            let data = ingest_dynamic(path)?;
            let splits = split_stratified(&data.events(), config.split, seed)?;
            let pre = Preprocessor::fit(data.train_rows(&splits))?;
            Ok(Prepared {
                name,
                train: Records::Dynamic(pre.apply_dynamic(&data, &splits.train)?),
                validation: Records::Dynamic(pre.apply_dynamic(&data, &splits.validation)?),
                test: Records::Dynamic(pre.apply_dynamic(&data, &splits.test)?),
            })
        }
    }
}

/// Everything a cell needs that depends only on the training split and K.
struct Context {
    grid: Grid,
    censoring: StepFunction,
    survival: StepFunction,
    metric: MetricConfig,
}

fn context(data: &Prepared, k: usize) -> Result<(Context, Verdict)> {
    let (times, events) = data.train.outcomes();
    if times.is_empty() {
        return Err(Error::InvalidInput("empty training split".into()));
    }
    let event_times: Vec<f64> = times.iter().zip(&events).filter(|(_, &e)| e).map(|(&t, _)| t).collect();
    let grid = Grid::from_event_times(&event_times, k)?;
    let censoring = censoring_km(&times, &events)?;
    let survival = kaplan_meier(&times, &events)?;
    let metric = MetricConfig::from_training_times(&times)?;
    let (test_times, test_events) = data.test.outcomes();
    let verdict = validate_dataset(&test_times, &test_events, grid.boundaries(), &censoring);
    Ok((
        Context {
            grid,
            censoring,
            survival,
            metric,
        },
        verdict,
    ))
}

/// One metric outcome of a cell: origin, metric name, value or reason.
type Outcome = (Option<usize>, &'static str, Result<f64>);

/// Metric slots a cell fills, used to emit null rows when it fails as a whole.
fn slots(setting: Setting, origins: &[usize]) -> Vec<(Option<usize>, &'static str)> {
    match setting {
        Setting::Static => METRICS.iter().map(|&m| (None, m)).collect(),
        Setting::Dynamic => origins
            .iter()
            .flat_map(|&o| [CINDEX, INTEGRATED_AUC, IBS].map(|m| (Some(o), m)))
            .chain([(None, TEST_BCE), (None, CLASSIFICATION_AUC)])
            .collect(),
    }
}

fn subsample(x: Array2<f64>, y: Vec<bool>, cap: Option<usize>, seed: u64) -> (Array2<f64>, Vec<bool>) {
    match cap {
        Some(cap) if x.nrows() > cap => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut keep = rand::seq::index::sample(&mut rng, x.nrows(), cap).into_vec();
            keep.sort_unstable();
            let labels = keep.iter().map(|&i| y[i]).collect();
            (x.select(Axis(0), &keep), labels)
        }
        _ => (x, y),
    }
}

fn survival_outcomes(origin: Option<usize>, m: SurvivalMetrics) -> [Outcome; 3] {
    [(origin, CINDEX, m.cindex), (origin, INTEGRATED_AUC, m.integrated_auc), (origin, IBS, m.ibs)]
}

fn classification_outcomes(probs: &[f64], labels: &[bool]) -> [Outcome; 2] {
    let bce = if labels.is_empty() {
        Err(Error::Undefined("no expanded test examples".into()))
    } else {
        Ok(mean_bce(probs, labels))
    };
    let auc = classification_auc(probs, labels).ok_or_else(|| Error::Undefined("test labels have a single class".into()));
    [(None, TEST_BCE, bce), (None, CLASSIFICATION_AUC, auc)]
}

struct CellInput<'a> {
    data: &'a Prepared,
    ctx: &'a Context,
    spec: &'a ModelSpec,
    cap: Option<usize>,
    seed: u64,
    config: &'a ExperimentConfig,
}

impl CellInput<'_> {
    fn classifier(&self) -> Result<Box<dyn Classifier>> {
        self.spec.build(&self.config.training, Duration::from_secs(self.config.external_timeout_secs))
    }
}

fn static_cell(input: &CellInput<'_>) -> Result<(Vec<Outcome>, String)> {
    let (Records::Static(train), Records::Static(test)) = (&input.data.train, &input.data.test) else {
        unreachable!("static cell on dynamic data")
    };
    let grid = &input.ctx.grid;
    let expand = |r: &[StaticRecord]| match input.spec.target {
        Target::Failure => expand_static(r, grid),
        Target::Hazard => expand_hazard(r, grid),
    };
    let examples = expand(train);
    if examples.is_empty() {
        return Err(Error::InvalidInput("no training examples".into()));
    }
    let (x, y) = static_design(&examples)?;
    let (x, y) = subsample(x, y, input.cap, input.seed);
    let mut clf = input.classifier()?;
    clf.fit(x.view(), &y)?;

    let m = grid.boundaries().len();
    let rows: Vec<Vec<f64>> = test
        .iter()
        .flat_map(|r| grid.boundaries().iter().map(|&t| static_features(&r.covariates, t)))
        .collect();
    let probs = checked_predict(clf.as_ref(), to_matrix(&rows)?.view())?;
    let curves = probs
        .chunks(m)
        .map(|p| match input.spec.target {
            Target::Failure => survival_from_failure(grid.boundaries().to_vec(), p),
            Target::Hazard => Ok(survival_from_hazard(&HazardCurve {
                times: grid.boundaries().to_vec(),
                values: p.to_vec(),
            })),
        })
        .collect::<Result<Vec<SurvivalCurve>>>()?;
    let risks = curves.iter().map(risk_static).collect::<Result<Vec<f64>>>()?;
    let times: Vec<f64> = test.iter().map(|r| r.observed_time).collect();
    let events: Vec<bool> = test.iter().map(|r| r.event).collect();
    let ctx = input.ctx;
    let metrics = static_metrics(&risks, &curves, &times, &events, &ctx.censoring, &ctx.survival, grid, &ctx.metric);

    let test_examples = expand(test);
    let example_probs: Vec<f64> = test_examples
        .iter()
        .map(|e| probs[e.subject_index * m + e.boundary_index - 1])
        .collect();
    let labels: Vec<bool> = test_examples.iter().map(|e| e.label).collect();
    let mut out: Vec<Outcome> = survival_outcomes(None, metrics).into();
    out.extend(classification_outcomes(&example_probs, &labels));
    Ok((out, String::new()))
}

/// Indices of subjects at risk at `t_k` and their stacked feature rows for
/// every later horizon.
fn landmark_rows(records: &[DynamicRecord], grid: &Grid, k: usize, options: FeatureOptions) -> Result<(Vec<usize>, Vec<Vec<f64>>)> {
    let last = grid.intervals() - 1;
    let t_k = grid.time(k);
    let cohort: Vec<usize> = (0..records.len()).filter(|&i| records[i].observed_time > t_k).collect();
    let mut rows = Vec::with_capacity(cohort.len() * last.saturating_sub(k));
    for &i in &cohort {
        for h in k + 1..=last {
            rows.push(featurize_dynamic(&records[i], grid, k, h, options)?);
        }
    }
    Ok((cohort, rows))
}

/// Landmark metrics at each origin given predicted failure probabilities
/// laid out as returned by [`landmark_rows`].
fn landmark_metrics(
    records: &[DynamicRecord],
    ctx: &Context,
    k: usize,
    cohort: &[usize],
    probs: &[f64],
) -> Result<SurvivalMetrics> {
    let grid = &ctx.grid;
    let horizons = grid.intervals() - 1 - k;
    let times_k = grid.boundaries()[k..].to_vec();
    let curves = probs
        .chunks(horizons)
        .map(|p| survival_from_failure(times_k.clone(), p))
        .collect::<Result<Vec<_>>>()?;
    let risks = curves.iter().map(risk_dynamic).collect::<Result<Vec<f64>>>()?;
    let times: Vec<f64> = cohort.iter().map(|&i| records[i].observed_time).collect();
    let events: Vec<bool> = cohort.iter().map(|&i| records[i].event).collect();
    Ok(dynamic_metrics(&risks, &curves, &times, &events, &ctx.censoring, &ctx.survival, grid, k, &ctx.metric))
}

struct Candidate {
    options: FeatureOptions,
    validation_score: f64,
    outcomes: Vec<Outcome>,
}

fn dynamic_candidate(input: &CellInput<'_>, options: FeatureOptions) -> Result<Candidate> {
    let (Records::Dynamic(train), Records::Dynamic(validation), Records::Dynamic(test)) =
        (&input.data.train, &input.data.validation, &input.data.test)
    else {
        unreachable!("dynamic cell on static data")
    };
    let ctx = input.ctx;
    let grid = &ctx.grid;
    let examples = expand_dynamic(train, grid, options)?;
    if examples.is_empty() {
        return Err(Error::InvalidInput("no training examples".into()));
    }
    let (x, y) = dynamic_design(&examples)?;
    let (x, y) = subsample(x, y, input.cap, input.seed);
    let mut clf = input.classifier()?;
    clf.fit(x.view(), &y)?;

    // one prediction batch: validation landmarks, test landmarks, test examples
    let last = grid.intervals() - 1;
    let origins: Vec<usize> = input.config.origins();
    let usable: Vec<usize> = origins.iter().copied().filter(|&k| k < last).collect();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut blocks = Vec::new();
    for (records, split) in [(validation, 0), (test, 1)] {
        for &k in &usable {
            let (cohort, r) = landmark_rows(records, grid, k, options)?;
            blocks.push((split, k, cohort, rows.len()..rows.len() + r.len()));
            rows.extend(r);
        }
    }
    let test_examples = expand_dynamic(test, grid, options)?;
    let example_start = rows.len();
    rows.extend(test_examples.iter().map(|e| e.features.clone()));
    let probs = if rows.is_empty() {
        Vec::new()
    } else {
        checked_predict(clf.as_ref(), to_matrix(&rows)?.view())?
    };

    let mut validation_scores = Vec::new();
    let mut outcomes: Vec<Outcome> = Vec::new();
    for (split, k, cohort, range) in blocks {
        let records = if split == 0 { validation } else { test };
        let metrics = landmark_metrics(records, ctx, k, &cohort, &probs[range])?;
        if split == 0 {
            if let Ok(c) = metrics.cindex {
                validation_scores.push(c);
            }
        } else {
            outcomes.extend(survival_outcomes(Some(k), metrics));
        }
    }
    for &k in origins.iter().filter(|&&k| k >= last) {
        for m in [CINDEX, INTEGRATED_AUC, IBS] {
            outcomes.push((Some(k), m, Err(Error::NoHorizons(k))));
        }
    }
    outcomes.sort_by_key(|(o, m, _)| (*o, METRICS.iter().position(|x| x == m)));
    let labels: Vec<bool> = test_examples.iter().map(|e| e.label).collect();
    outcomes.extend(classification_outcomes(&probs[example_start..], &labels));

    let validation_score = if validation_scores.is_empty() {
        f64::NEG_INFINITY
    } else {
        validation_scores.iter().sum::<f64>() / validation_scores.len() as f64
    };
    Ok(Candidate {
        options,
        validation_score,
        outcomes,
    })
}

fn dynamic_cell(input: &CellInput<'_>) -> Result<(Vec<Outcome>, String)> {
    let mut best: Option<Candidate> = None;
    for options in input.config.features.candidates() {
        let c = dynamic_candidate(input, options)?;
        if best.as_ref().is_none_or(|b| c.validation_score > b.validation_score) {
            best = Some(c);
        }
    }
    let best = best.expect("at least one feature variant");
    Ok((best.outcomes, format!("features={}", best.options.label())))
}

struct Job {
    dataset: usize,
    k: usize,
    model: usize,
}

type CellResult = (Vec<ResultRow>, CellTiming, Option<CellFailure>);

fn run_jobs(config: &ExperimentConfig, prepared: &[Prepared]) -> Result<Vec<CellResult>> {
    let specs = config.model_specs()?;
    let ks = config.k_values();
    let origins = config.origins();
    let contexts: Vec<Vec<Result<(Context, Verdict)>>> = prepared
        .iter()
        .map(|d| ks.iter().map(|&k| context(d, k)).collect())
        .collect();
    let jobs: Vec<Job> = (0..prepared.len())
        .flat_map(|d| (0..ks.len()).flat_map(move |k| (0..config.models.len()).map(move |m| Job { dataset: d, k, model: m })))
        .collect();

    Ok(jobs
        .par_iter()
        .map(|job| {
            let start = Instant::now();
            let data = &prepared[job.dataset];
            let name = &config.models[job.model];
            let spec = &specs[job.model];
            let k = ks[job.k];
            let mut grid_k = None;
            let mut failure = None;
            let result = match &contexts[job.dataset][job.k] {
                Err(e) => Err(e.to_string()),
                Ok((_, verdict)) if !verdict.passed() => Err(verdict.reasons.join("; ")),
                Ok((ctx, _)) => {
                    grid_k = Some(ctx.grid.intervals());
                    let input = CellInput {
                        data,
                        ctx,
                        spec,
                        cap: config.subsample_cap(name, spec),
                        seed: derive_seed(config.seed, &[job.dataset as u64, k as u64, job.model as u64]),
                        config,
                    };
                    let cell = match config.setting {
                        Setting::Static => static_cell(&input),
                        Setting::Dynamic => dynamic_cell(&input),
                    };
                    cell.map_err(|e| {
                        log::warn!("{} / {name} / K={k}: {e}", data.name);
                        failure = Some(CellFailure {
                            dataset: data.name.clone(),
                            model: name.clone(),
                            k,
                            reason: e.to_string(),
                            exit_code: e.exit_code(),
                        });
                        e.to_string()
                    })
                }
            };
            let row = |origin, metric: &str, value, note| ResultRow {
                dataset: data.name.clone(),
                model: name.clone(),
                k,
                grid_k,
                origin,
                metric: metric.to_owned(),
                value,
                note,
            };
            let rows = match result {
                Ok((outcomes, note)) => outcomes
                    .into_iter()
                    .map(|(origin, metric, value)| match value {
                        Ok(v) if v.is_finite() => row(origin, metric, Some(v), note.clone()),
                        Ok(v) => row(origin, metric, None, format!("non-finite value {v}")),
                        Err(e) => row(origin, metric, None, e.to_string()),
                    })
                    .collect(),
                Err(reason) => slots(config.setting, &origins)
                    .into_iter()
                    .map(|(origin, metric)| row(origin, metric, None, reason.clone()))
                    .collect(),
            };
            let timing = CellTiming {
                dataset: data.name.clone(),
                model: name.clone(),
                k,
                seconds: start.elapsed().as_secs_f64(),
            };
            (rows, timing, failure)
        })
        .collect())
}

/// Runs every dataset x K x model cell. `jobs` bounds the worker threads;
/// `None` uses rayon's default. A failing cell produces null rows with the
/// reason and does not stop the run; unreadable datasets do.
pub fn run_experiment(config: &ExperimentConfig, jobs: Option<usize>) -> Result<RunOutput> {
    config.validate()?;
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    let (prepared, cells) = pool.install(|| -> Result<_> {
        let prepared = config
            .datasets
            .par_iter()
            .enumerate()
            .map(|(i, p)| prepare(config, i, p))
            .collect::<Result<Vec<_>>>()?;
        let cells = run_jobs(config, &prepared)?;
        Ok((prepared, cells))
    })?;
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    let mut failures = Vec::new();
    for (r, t, f) in cells {
        rows.push(r);
        timings.push(t);
        failures.extend(f);
    }
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_owned(),
        config_hash: config.hash()?,
        seed: config.seed,
        setting: config.setting,
        datasets: prepared.iter().map(|p| p.name.clone()).collect(),
        models: config.models.clone(),
        k_values: config.k_values(),
        jobs: pool.current_num_threads(),
        wall_seconds: start.elapsed().as_secs_f64(),
        cells: timings,
        failures,
    };
    Ok(RunOutput {
        table: ResultsTable {
            rows: rows.into_iter().flatten().collect(),
        },
        manifest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_per_cell() {
        let a = derive_seed(7, &[0, 4, 1]);
        assert_eq!(a, derive_seed(7, &[0, 4, 1]));
        assert_ne!(a, derive_seed(7, &[1, 4, 0]));
        assert_ne!(a, derive_seed(8, &[0, 4, 1]));
    }

    #[test]
    fn subsample_is_seeded_and_ordered() {
        let x = Array2::from_shape_fn((10, 1), |(i, _)| i as f64);
        let y: Vec<bool> = (0..10).map(|i| i % 2 == 0).collect();
        let (a, la) = subsample(x.clone(), y.clone(), Some(4), 1);
        let (b, _) = subsample(x.clone(), y.clone(), Some(4), 1);
        assert_eq!(a, b);
        assert_eq!(a.nrows(), 4);
        let col: Vec<f64> = a.column(0).to_vec();
        assert!(col.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(la, col.iter().map(|&v| (v as usize).is_multiple_of(2)).collect::<Vec<_>>());
        assert_eq!(subsample(x, y, Some(20), 1).0.nrows(), 10);
    }

    #[test]
    fn table_round_trip() {
        let table = ResultsTable {
            rows: vec![
                ResultRow {
                    dataset: "d".into(),
                    model: "external:python3 x.py".into(),
                    k: 5,
                    grid_k: Some(4),
                    origin: Some(1),
                    metric: CINDEX.into(),
                    value: Some(0.1 + 0.2),
                    note: "features=full".into(),
                },
                ResultRow {
                    dataset: "d".into(),
                    model: "logistic".into(),
                    k: 5,
                    grid_k: None,
                    origin: None,
                    metric: IBS.into(),
                    value: None,
                    note: "no censoring support, at t = 3".into(),
                },
            ],
        };
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        assert_eq!(ResultsTable::read_csv(buf.as_slice()).unwrap(), table);
    }
}
