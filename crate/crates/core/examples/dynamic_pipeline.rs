// Landmark prediction from covariate histories. A frequency classifier is
// fit on the dynamic expansion of a two-state population and its
// conditional survival curves are compared with the generating law.

use survstack::classify::{Classifier, FrequencyClassifier};
use survstack::error::Result;
use survstack::grid::{dynamic_design, expand_dynamic, FeatureOptions};
use survstack::infer::survival_dynamic;
use survstack::synth::{gen_dynamic, DynamicTruth};

/// Largest gap between estimated and true conditional survival.
pub fn run_example() -> Result<f64> {
    let truth = DynamicTruth::two_state();
    let grid = truth.validate()?;
    let sample = gen_dynamic(&truth, 20_000, 7)?;

    let options = FeatureOptions::default();
    let (x, y) = dynamic_design(&expand_dynamic(&sample.records, &grid, options)?)?;
    let mut model = FrequencyClassifier::new();
    model.fit(x.view(), &y)?;

    let last = grid.intervals() - 1;
    let mut worst: f64 = 0.0;
    for state in 0..2 {
        for k in 0..last {
            let t_k = grid.time(k);
            // any subject of this state still at risk at t_k shares the same history
            let Some(i) = (0..sample.records.len()).find(|&i| sample.states[i] == state && sample.records[i].observed_time > t_k) else {
                continue;
            };
            let curve = survival_dynamic(&model, &sample.records[i], &grid, k, options)?;
            for (d, (&t, &s)) in curve.times.iter().zip(&curve.values).enumerate() {
                let exact = truth.conditional_survival(state, k, d + 1);
                worst = worst.max((s - exact).abs());
                println!("state {state} origin t={t_k} horizon t={t}: estimate {s:.4}, truth {exact:.4}");
            }
        }
    }
    println!("max error {worst:.4}");
    Ok(worst)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
