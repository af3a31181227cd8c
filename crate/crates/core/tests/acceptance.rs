//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test --test acceptance -- --nocapture` or just `cargo test`.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use survstack::bench::config::FeatureChoice;
use survstack::bench::io::write_static;
use survstack::bench::{report, run_experiment, ExperimentConfig, Setting};
use survstack::classify::{Classifier, FrequencyClassifier, TrainingConfig};
use survstack::error::Result;
use survstack::grid::{dynamic_design, expand_dynamic, expand_static, static_design, FeatureOptions};
use survstack::infer::{survival_dynamic, survival_static};
use survstack::metrics::{elo_arena, EloConfig};
use survstack::record::StaticRecord;
use survstack::synth::{gen_discrete, gen_dynamic, gen_weibull, true_survival, DiscreteTruth, DynamicTruth, WeibullTruth};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

/// Largest error of frequency-fitted curves over every support cell.
fn discrete_error(n: usize, seed: u64) -> Result<f64> {
    let truth = DiscreteTruth::four_cell();
    let grid = truth.validate()?;
    let records = gen_discrete(&truth, n, seed)?;
    let (x, y) = static_design(&expand_static(&records, &grid))?;
    let mut model = FrequencyClassifier::new();
    model.fit(x.view(), &y)?;
    let mut worst: f64 = 0.0;
    for cell in &truth.support {
        let curve = survival_static(&model, cell, &grid)?;
        for (k, s) in curve.values.iter().enumerate() {
            worst = worst.max((s - true_survival(&truth, cell, k + 1)?).abs());
        }
    }
    Ok(worst)
}

fn static_consistency() -> Outcome {
    let start = Instant::now();
    let errors = discrete_error(20_000, 11).and_then(|a| Ok((a, discrete_error(200_000, 12)?)));
    let elapsed = start.elapsed();
    match errors {
        Ok((small, large)) => outcome(
            small <= 0.05 && large <= 0.02 && within(elapsed, 60),
            format!("max error {small:.4} at n=20000, {large:.4} at n=200000, {:.1}s", elapsed.as_secs_f64()),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn dynamic_error(n: usize, seed: u64) -> Result<(f64, usize)> {
    let truth = DynamicTruth::two_state();
    let grid = truth.validate()?;
    let sample = gen_dynamic(&truth, n, seed)?;
    let options = FeatureOptions::default();
    let (x, y) = dynamic_design(&expand_dynamic(&sample.records, &grid, options)?)?;
    let mut model = FrequencyClassifier::new();
    model.fit(x.view(), &y)?;
    let (mut worst, mut checked) = (0.0f64, 0);
    for state in 0..2 {
        for k in 0..grid.intervals() - 1 {
            let t_k = grid.time(k);
            let subject = (0..sample.records.len())
                .find(|&i| sample.states[i] == state && sample.records[i].observed_time > t_k)
                .ok_or_else(|| survstack::error::Error::InvalidInput(format!("no state {state} subject at risk at {t_k}")))?;
            let curve = survival_dynamic(&model, &sample.records[subject], &grid, k, options)?;
            for (d, s) in curve.values.iter().enumerate() {
                worst = worst.max((s - truth.conditional_survival(state, k, d + 1)).abs());
                checked += 1;
            }
        }
    }
    Ok((worst, checked))
}

fn dynamic_consistency() -> Outcome {
    let start = Instant::now();
    let result = dynamic_error(50_000, 13);
    let elapsed = start.elapsed();
    match result {
        Ok((worst, checked)) => outcome(
            worst <= 0.05 && checked > 0 && within(elapsed, 120),
            format!("max error {worst:.4} over {checked} (state, k, delta) cells, {:.1}s", elapsed.as_secs_f64()),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn metric_oracles() -> Outcome {
    let (compared, mut failures) = common::metric_oracle_check(200, 1);
    failures.extend(common::km_oracle_check(200, 2));
    let shown: Vec<&str> = failures.iter().take(3).map(String::as_str).collect();
    outcome(
        failures.is_empty(),
        format!("{compared} metric values on 200 instances, KM exact; {} mismatches {shown:?}", failures.len()),
    )
}

/// Covariates rounded to a half-unit lattice so a cell-memorizing classifier
/// sees repeated rows.
fn lattice_dataset(dir: &Path, i: usize) -> Result<PathBuf> {
    let mut rng = ChaCha8Rng::seed_from_u64(1_000 + i as u64);
    let d = 2 + i % 3;
    let truth = WeibullTruth {
        coefficients: (0..d).map(|_| rng.random_range(-1.2..1.2)).collect(),
        shape: rng.random_range(0.7..2.5),
        censor_rate: rng.random_range(0.1..0.8),
    };
    let n = 600 + 100 * (i % 5);
    let records: Vec<StaticRecord> = gen_weibull(&truth, n, d, i as u64)?
        .into_iter()
        .map(|mut r| {
            for v in &mut r.covariates {
                *v = (*v * 2.0).round() / 2.0;
            }
            r
        })
        .collect();
    let path = dir.join(format!("lattice{i:02}.csv"));
    write_static(&records, std::fs::File::create(&path)?)?;
    Ok(path)
}

fn correlation_config(datasets: Vec<PathBuf>, output_dir: PathBuf) -> ExperimentConfig {
    ExperimentConfig {
        setting: Setting::Static,
        datasets,
        models: vec!["logistic".into(), "stumps".into(), "frequency".into()],
        k_values: Some(vec![5, 10]),
        split: [0.7, 0.15, 0.15],
        seed: 3,
        subsample_caps: Default::default(),
        origins: None,
        features: FeatureChoice::Select,
        output_dir,
        external_timeout_secs: 60,
        training: TrainingConfig::default(),
    }
}

fn loss_correlation() -> Outcome {
    let start = Instant::now();
    let result = (|| -> Result<(Option<f64>, Option<f64>, usize)> {
        let dir = tempfile::tempdir()?;
        let datasets = (0..20).map(|i| lattice_dataset(dir.path(), i)).collect::<Result<Vec<_>>>()?;
        let run = run_experiment(&correlation_config(datasets, dir.path().join("out")), None)?;
        let summary = report(std::slice::from_ref(&run.table), None)?;
        let r = |x: &str| summary.correlation.iter().find(|c| c.x == x).and_then(|c| c.pearson_r);
        let points = summary.correlation.first().map_or(0, |c| c.n);
        Ok((r("test_bce"), r("classification_auc"), points))
    })();
    let elapsed = start.elapsed();
    match result {
        Ok((Some(bce), Some(auc), points)) => outcome(
            bce >= 0.7 && auc > 0.0 && within(elapsed, 600),
            format!(
                "r(BCE, IBS) = {bce:.3}, r(cAUC, C-index) = {auc:.3} over {points} (dataset, model) points, {:.1}s",
                elapsed.as_secs_f64()
            ),
        ),
        Ok((bce, auc, _)) => outcome(false, format!("undefined correlation: {bce:?} {auc:?}")),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn monotonicity() -> Outcome {
    let failures = common::monotonicity_check(10_000, 4);
    outcome(failures.is_empty(), format!("10000 vectors, {} violations", failures.len()))
}

fn rank_invariance() -> Outcome {
    let failures = common::rank_invariance_check(100, 3);
    outcome(failures.is_empty(), format!("100 instances, {} changes", failures.len()))
}

fn elo() -> Outcome {
    let config = EloConfig::default();
    let duel = elo_arena(&[1.0, 0.0], true, &config);
    let duel_ok = duel == [1016.0, 984.0];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..1_000 {
        let m = rng.random_range(2..9);
        // coarse scores so ties occur
        let scores: Vec<f64> = (0..m).map(|_| rng.random_range(0..5) as f64 / 4.0).collect();
        let ratings = elo_arena(&scores, rng.random_bool(0.5), &config);
        let total: f64 = ratings.iter().sum();
        worst = worst.max((total - 1000.0 * m as f64).abs());
    }
    outcome(
        duel_ok && worst < 1e-9,
        format!("single win gives {duel:?}; worst sum drift {worst:.1e} over 1000 arenas"),
    )
}

fn gradient() -> Outcome {
    let errors = common::gradient_check(50, 5);
    let worst = errors.iter().copied().fold(0.0, f64::max);
    outcome(errors.len() == 50 && worst < 1e-5, format!("worst relative error {worst:.2e} on {} instances", errors.len()))
}

fn determinism() -> Outcome {
    let result = (|| -> Result<bool> {
        let dir = tempfile::tempdir()?;
        let d = dir.path();
        let data: Vec<String> = (0..3)
            .map(|i| lattice_dataset(d, i).map(|p| format!("{:?}", p.file_name().unwrap().to_string_lossy())))
            .collect::<Result<_>>()?;
        std::fs::write(
            d.join("config.toml"),
            format!(
                "setting = \"static\"\ndatasets = [{}]\nmodels = [\"logistic\", \"stumps\", \"hazard:logistic\", \"frequency\"]\nk_values = [4, 10]\nseed = 17\n",
                data.join(", ")
            ),
        )?;
        let mut outputs = Vec::new();
        for (jobs, out) in [("1", "first"), ("4", "second")] {
            let status = Command::new(env!("CARGO_BIN_EXE_survstack"))
                .args(["run", "--jobs", jobs, "--config"])
                .arg(d.join("config.toml"))
                .arg("--out")
                .arg(d.join(out))
                .output()?
                .status;
            if !status.success() {
                return Ok(false);
            }
            outputs.push(std::fs::read(d.join(out).join("results.csv"))?);
        }
        Ok(!outputs[0].is_empty() && outputs[0] == outputs[1])
    })();
    match result {
        Ok(same) => outcome(same, "two `run` executions (--jobs 1 and --jobs 4), results.csv compared byte for byte"),
        Err(e) => outcome(false, e.to_string()),
    }
}

type Check = fn() -> Outcome;

fn main() {
    let checks: [(&str, Check); 9] = [
        ("static consistency (discrete law, frequency classifier)", static_consistency),
        ("dynamic consistency (two-state histories)", dynamic_consistency),
        ("metric oracle equivalence", metric_oracles),
        ("BCE/IBS and cAUC/C-index correlation", loss_correlation),
        ("monotone survival curves", monotonicity),
        ("rank invariance of C-index and AUC", rank_invariance),
        ("Elo arithmetic", elo),
        ("logistic gradient check", gradient),
        ("run determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let o = check();
        if !o.passed {
            failed += 1;
        }
        println!("{} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
