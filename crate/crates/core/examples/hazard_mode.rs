// Failure-probability and discrete-hazard targets on the same data. Both
// recover the true survival of every covariate cell.

use survstack::classify::{Classifier, FrequencyClassifier};
use survstack::error::Result;
use survstack::grid::{expand_hazard, expand_static, static_design, StaticExample};
use survstack::infer::{survival_static_batch, Target};
use survstack::synth::{gen_discrete, true_survival, DiscreteTruth};

fn fit(examples: &[StaticExample]) -> Result<FrequencyClassifier> {
    let (x, y) = static_design(examples)?;
    let mut model = FrequencyClassifier::new();
    model.fit(x.view(), &y)?;
    Ok(model)
}

/// Maximum absolute error of the failure-mode and hazard-mode curves.
pub fn run_example() -> Result<(f64, f64)> {
    let truth = DiscreteTruth::four_cell();
    let grid = truth.grid()?;
    let records = gen_discrete(&truth, 40_000, 11)?;

    let failure = fit(&expand_static(&records, &grid))?;
    let hazard = fit(&expand_hazard(&records, &grid))?;
    let by_failure = survival_static_batch(&failure, &truth.support, &grid, Target::Failure)?;
    let by_hazard = survival_static_batch(&hazard, &truth.support, &grid, Target::Hazard)?;

    let (mut worst_failure, mut worst_hazard): (f64, f64) = (0.0, 0.0);
    for (cell, x) in truth.support.iter().enumerate() {
        for k in 1..grid.intervals() {
            let exact = true_survival(&truth, x, k)?;
            let a = by_failure[cell].values[k - 1];
            let b = by_hazard[cell].values[k - 1];
            worst_failure = worst_failure.max((a - exact).abs());
            worst_hazard = worst_hazard.max((b - exact).abs());
            println!("x={x:?} k={k}: truth {exact:.3}, failure {a:.3}, hazard {b:.3}");
        }
    }
    println!("max error: failure {worst_failure:.4}, hazard {worst_hazard:.4}");
    Ok((worst_failure, worst_hazard))
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
