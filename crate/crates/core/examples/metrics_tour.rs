// Censoring-aware evaluation on a dozen hand-written subjects: the
// Kaplan-Meier curves, Uno's C-index, cumulative/dynamic AUC, Brier scores
// and their landmark versions.

use survstack::error::Result;
use survstack::metrics::{
    auc_at_time, auc_from, brier_at_time, censoring_km, cindex_from, cindex_ipcw, integrated_brier, kaplan_meier,
    MetricConfig,
};

pub fn run_example() -> Result<f64> {
    let times = [1.0, 1.5, 2.0, 2.0, 3.0, 3.5, 4.0, 5.0, 5.5, 6.0, 7.0, 8.0];
    let events = [true, false, true, true, false, true, true, false, true, false, true, false];
    // higher risk should mean an earlier event; a few pairs are out of order
    let risks = [0.9, 0.7, 0.6, 0.75, 0.4, 0.8, 0.5, 0.3, 0.2, 0.35, 0.25, 0.1];

    let km = kaplan_meier(&times, &events)?;
    let g = censoring_km(&times, &events)?;
    for t in [1.0, 2.0, 4.0, 7.0] {
        println!("t={t}: S={:.4}, G={:.4}", km.eval(t), g.eval(t));
    }

    let config = MetricConfig::from_training_times(&times)?;
    let c = cindex_ipcw(&risks, &times, &events, &g, &config)?;
    println!("Uno C-index: {c:.4}");

    for t in [2.0, 4.0, 6.0] {
        println!("AUC({t}) = {:.4}", auc_at_time(&risks, &times, &events, &g, t)?);
    }

    // Brier scores of a model predicting S(t) = exp(-risk * t / 3)
    let eval_times = [2.0, 4.0, 6.0];
    let mut scores = Vec::new();
    for &t in &eval_times {
        let predictions: Vec<f64> = risks.iter().map(|r| (-r * t / 3.0).exp()).collect();
        let b = brier_at_time(&predictions, &times, &events, &g, t)?;
        println!("Brier({t}) = {b:.4}");
        scores.push(b);
    }
    println!("IBS over [2, 6]: {:.4}", integrated_brier(&scores, &eval_times)?);

    // the same quantities for subjects still event-free at s = 2
    let s = 2.0;
    println!("C-index | T > {s}: {:.4}", cindex_from(s, &risks, &times, &events, &g, &config)?);
    println!("AUC(5) | T > {s}: {:.4}", auc_from(s, &risks, &times, &events, &g, 5.0)?);
    Ok(c)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
