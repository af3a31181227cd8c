use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use survstack::bench::config::FeatureChoice;
use survstack::bench::io::{write_dynamic, write_dynamic_examples, write_static, write_static_examples};
use survstack::bench::report::{read_per_dataset, report_from_scores};
use survstack::bench::{ingest_dynamic, ingest_static, report, run_experiment, ExperimentConfig, Preprocessor, ResultsTable, Splits};
use survstack::error::{Error, Result};
use survstack::grid::{expand_dynamic, expand_hazard, expand_static, Grid};
use survstack::record::{DynamicRecord, StaticRecord};
use survstack::synth::{gen_discrete, gen_dynamic, gen_weibull, DiscreteTruth, DynamicTruth, WeibullTruth};

#[derive(Parser)]
#[command(name = "survstack", version, about = "Survival analysis through binary classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    Discrete,
    Weibull,
    Dynamic,
}

#[derive(Subcommand)]
enum Command {
    /// Print the quantile grid of a dataset's event times.
    Grid {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, short)]
        k: usize,
        /// Long-format file with `id` and `obs_time` columns.
        #[arg(long)]
        dynamic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic dataset as CSV.
    Synth {
        #[arg(long, value_enum)]
        kind: SynthKind,
        #[arg(long, short)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Covariates for the Weibull generator.
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 1.5)]
        shape: f64,
        #[arg(long, default_value_t = 0.3)]
        censor_rate: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the classification rows of a dataset.
    Expand {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, short)]
        k: usize,
        #[arg(long)]
        dynamic: bool,
        /// Static only: keep rows at risk at the start of each interval.
        #[arg(long)]
        hazard: bool,
        #[arg(long, value_enum, default_value = "base")]
        features: Features,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment config and write results.csv and manifest.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Summarize results tables (or a saved per_dataset.csv).
    Report {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Only cells with this K; default averages over every K.
        #[arg(long, short)]
        k: Option<usize>,
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Features {
    Base,
    Elapsed,
    Horizon,
    Full,
}

impl From<Features> for FeatureChoice {
    fn from(f: Features) -> Self {
        match f {
            Features::Base => FeatureChoice::Base,
            Features::Elapsed => FeatureChoice::Elapsed,
            Features::Horizon => FeatureChoice::Horizon,
            Features::Full => FeatureChoice::Full,
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

/// Every row of a file with fitted preprocessing, no split.
fn load_static(path: &Path) -> Result<Vec<StaticRecord>> {
    let data = ingest_static(path)?;
    let all = Splits {
        train: (0..data.len()).collect(),
        validation: Vec::new(),
        test: Vec::new(),
    };
    Preprocessor::fit(data.train_rows(&all))?.apply_static(&data, &all.train)
}

fn load_dynamic(path: &Path) -> Result<Vec<DynamicRecord>> {
    let data = ingest_dynamic(path)?;
    let all = Splits {
        train: (0..data.subjects.len()).collect(),
        validation: Vec::new(),
        test: Vec::new(),
    };
    Preprocessor::fit(data.train_rows(&all))?.apply_dynamic(&data, &all.train)
}

fn grid_for(path: &Path, k: usize, dynamic: bool) -> Result<Grid> {
    let (times, events): (Vec<f64>, Vec<bool>) = if dynamic {
        let d = ingest_dynamic(path)?;
        (d.times(), d.events())
    } else {
        let d = ingest_static(path)?;
        (d.times, d.events)
    };
    let event_times: Vec<f64> = times.iter().zip(&events).filter(|(_, &e)| e).map(|(&t, _)| t).collect();
    Grid::from_event_times(&event_times, k)
}

fn weibull_truth(dim: usize, shape: f64, censor_rate: f64) -> WeibullTruth {
    WeibullTruth {
        coefficients: (0..dim)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -0.5 };
                sign / (1 + j / 2) as f64
            })
            .collect(),
        shape,
        censor_rate,
    }
}

fn read_header(path: &Path) -> Result<String> {
    let mut line = String::new();
    BufReader::new(File::open(path)?).read_line(&mut line)?;
    Ok(line)
}

/// Exit status on success; a run whose cells hit model errors still writes
/// its tables but reports status 3.
fn execute(command: Command) -> Result<ExitCode> {
    match command {
        Command::Grid { data, k, dynamic, out } => {
            let grid = grid_for(&data, k, dynamic)?;
            let mut w = output(out.as_deref())?;
            writeln!(w, "k,t")?;
            for (i, t) in grid.boundaries().iter().enumerate() {
                writeln!(w, "{},{t}", i + 1)?;
            }
        }
        Command::Synth {
            kind,
            n,
            seed,
            dim,
            shape,
            censor_rate,
            out,
        } => {
            let w = output(out.as_deref())?;
            match kind {
                SynthKind::Discrete => write_static(&gen_discrete(&DiscreteTruth::four_cell(), n, seed)?, w)?,
                SynthKind::Weibull => write_static(&gen_weibull(&weibull_truth(dim, shape, censor_rate), n, dim, seed)?, w)?,
                SynthKind::Dynamic => write_dynamic(&gen_dynamic(&DynamicTruth::two_state(), n, seed)?.records, w)?,
            }
        }
        Command::Expand {
            data,
            k,
            dynamic,
            hazard,
            features,
            out,
        } => {
            let grid = grid_for(&data, k, dynamic)?;
            let w = output(out.as_deref())?;
            if dynamic {
                if hazard {
                    return Err(Error::Config("--hazard applies to static data only".into()));
                }
                let options = FeatureChoice::from(features).candidates()[0];
                write_dynamic_examples(&expand_dynamic(&load_dynamic(&data)?, &grid, options)?, w)?;
            } else {
                let records = load_static(&data)?;
                let examples = if hazard { expand_hazard(&records, &grid) } else { expand_static(&records, &grid) };
                write_static_examples(&examples, w)?;
            }
        }
        Command::Run { config, seed, out, jobs } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                config.seed = s;
            }
            if let Some(o) = out {
                config.output_dir = o;
            }
            if jobs == Some(0) {
                return Err(Error::Config("--jobs must be at least 1".into()));
            }
            let run = run_experiment(&config, jobs)?;
            run.write(&config.output_dir)?;
            let nulls = run.table.rows.iter().filter(|r| r.value.is_none()).count();
            eprintln!(
                "{} rows ({nulls} null) written to {}",
                run.table.rows.len(),
                config.output_dir.display()
            );
            if let Some(f) = run.manifest.failures.iter().find(|f| f.exit_code == 3) {
                eprintln!("model failure in {} / {} / K={}: {}", f.dataset, f.model, f.k, f.reason);
                return Ok(ExitCode::from(3));
            }
        }
        Command::Report { inputs, k, out } => {
            let first = read_header(&inputs[0])?;
            let summary = if first.trim_end().split(',').any(|c| c == "grid_k") {
                let tables = inputs.iter().map(ResultsTable::load).collect::<Result<Vec<_>>>()?;
                report(&tables, k)?
            } else {
                if inputs.len() != 1 || k.is_some() {
                    return Err(Error::Config("a per-dataset file is reported alone and without --k".into()));
                }
                report_from_scores(read_per_dataset(File::open(&inputs[0])?)?)?
            };
            summary.write(&out)?;
            for c in &summary.correlation {
                let r = c.pearson_r.map_or_else(|| "undefined".to_string(), |r| format!("{r:.4}"));
                eprintln!("r({}, {}) = {r} over {} points", c.x, c.y, c.n);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
