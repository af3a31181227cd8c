// Static survival curves from a logistic classifier trained on stacked
// `(x, t_k)` rows, scored on a held-out sample.

use survstack::classify::{Classifier, LogisticRegression, TrainingConfig};
use survstack::error::Result;
use survstack::grid::{expand_static, static_design, Grid};
use survstack::infer::{risk_static, survival_static_batch, Target};
use survstack::metrics::{censoring_km, kaplan_meier, static_metrics, MetricConfig};
use survstack::synth::{gen_weibull, WeibullTruth};

pub struct Summary {
    pub intervals: usize,
    pub training_rows: usize,
    pub cindex: f64,
    pub integrated_auc: f64,
    pub ibs: f64,
}

pub fn run_example() -> Result<Summary> {
    let truth = WeibullTruth {
        coefficients: vec![1.0, -0.5, 0.25],
        shape: 1.5,
        censor_rate: 0.3,
    };
    let train = gen_weibull(&truth, 2_000, 3, 1)?;
    let test = gen_weibull(&truth, 500, 3, 2)?;

    let grid = Grid::from_records(&train, 5)?;
    let examples = expand_static(&train, &grid);
    let (x, y) = static_design(&examples)?;
    let mut model = LogisticRegression::new(TrainingConfig::default());
    model.fit(x.view(), &y)?;

    let covariates: Vec<Vec<f64>> = test.iter().map(|r| r.covariates.clone()).collect();
    let curves = survival_static_batch(&model, &covariates, &grid, Target::Failure)?;
    let risks = curves.iter().map(risk_static).collect::<Result<Vec<_>>>()?;

    let train_times: Vec<f64> = train.iter().map(|r| r.observed_time).collect();
    let train_events: Vec<bool> = train.iter().map(|r| r.event).collect();
    let censoring = censoring_km(&train_times, &train_events)?;
    let survival = kaplan_meier(&train_times, &train_events)?;
    let config = MetricConfig::from_training_times(&train_times)?;

    let times: Vec<f64> = test.iter().map(|r| r.observed_time).collect();
    let events: Vec<bool> = test.iter().map(|r| r.event).collect();
    let m = static_metrics(&risks, &curves, &times, &events, &censoring, &survival, &grid, &config);

    println!("boundaries: {:?}", grid.boundaries());
    println!("first test subject: S = {:?}", curves[0].values);
    let summary = Summary {
        intervals: grid.intervals(),
        training_rows: examples.len(),
        cindex: m.cindex?,
        integrated_auc: m.integrated_auc?,
        ibs: m.ibs?,
    };
    println!(
        "{} training rows; C-index {:.3}, integrated AUC {:.3}, IBS {:.3}",
        summary.training_rows, summary.cindex, summary.integrated_auc, summary.ibs
    );
    Ok(summary)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
