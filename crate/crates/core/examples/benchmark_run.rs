// A miniature benchmark: synthetic datasets written as CSV, an experiment
// config, a full run over K and models, and the report tables with the
// correlation between test BCE and integrated Brier score.

use std::path::{Path, PathBuf};

use survstack::bench::config::FeatureChoice;
use survstack::bench::io::write_static;
use survstack::bench::report::Report;
use survstack::bench::{report, run_experiment, ExperimentConfig, ResultsTable, Setting};
use survstack::classify::TrainingConfig;
use survstack::error::Result;
use survstack::synth::{gen_weibull, WeibullTruth};

pub fn write_datasets(dir: &Path, count: usize, n: usize) -> Result<Vec<PathBuf>> {
    (0..count)
        .map(|i| {
            let truth = WeibullTruth {
                coefficients: vec![1.0 - 0.1 * i as f64, -0.5, 0.25],
                shape: 1.0 + 0.1 * i as f64,
                censor_rate: 0.2 + 0.05 * i as f64,
            };
            let path = dir.join(format!("weibull{i:02}.csv"));
            write_static(&gen_weibull(&truth, n, 3, i as u64)?, std::fs::File::create(&path)?)?;
            Ok(path)
        })
        .collect()
}

pub fn config(datasets: Vec<PathBuf>, output_dir: PathBuf) -> ExperimentConfig {
    ExperimentConfig {
        setting: Setting::Static,
        datasets,
        models: vec!["logistic".into(), "stumps".into(), "hazard:logistic".into()],
        k_values: Some(vec![4, 5]),
        split: [0.7, 0.15, 0.15],
        seed: 1,
        subsample_caps: Default::default(),
        origins: None,
        features: FeatureChoice::Select,
        output_dir,
        external_timeout_secs: 60,
        training: TrainingConfig {
            boosting_rounds: 60,
            ..TrainingConfig::default()
        },
    }
}

pub fn run_example() -> Result<(ResultsTable, Report)> {
    let dir = std::env::temp_dir().join(format!("survstack-bench-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let datasets = write_datasets(&dir, 4, 600)?;
    let config = config(datasets, dir.join("results"));

    let run = run_experiment(&config, None)?;
    run.write(&config.output_dir)?;
    let summary = report(std::slice::from_ref(&run.table), None)?;
    summary.write(dir.join("report"))?;

    for row in summary.aggregate.iter().filter(|r| r.metric == "cindex") {
        println!(
            "{:<16} C-index {:.3} ± {:.3}, rank {:.2}, Elo {:.1}",
            row.model,
            row.mean.unwrap_or(f64::NAN),
            row.std_error.unwrap_or(f64::NAN),
            row.avg_rank.unwrap_or(f64::NAN),
            row.elo.unwrap_or(f64::NAN)
        );
    }
    for c in &summary.correlation {
        println!("r({}, {}) = {:?} over {} points", c.x, c.y, c.pearson_r, c.n);
    }
    std::fs::remove_dir_all(&dir)?;
    Ok((run.table, summary))
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
