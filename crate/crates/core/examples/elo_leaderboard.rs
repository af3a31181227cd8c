// Ranking models across datasets by average rank and by Elo, where every
// dataset is an arena and each model pair plays once per arena.

use std::collections::BTreeMap;

use survstack::error::Result;
use survstack::metrics::{average_rank, elo_arena, elo_ratings, EloConfig, ScoreTable};

pub fn run_example() -> Result<BTreeMap<String, f64>> {
    let scores = [
        ("aids", [("logistic", 0.71), ("stumps", 0.74), ("frequency", 0.58)]),
        ("flchain", [("logistic", 0.79), ("stumps", 0.78), ("frequency", 0.61)]),
        ("gbsg", [("logistic", 0.66), ("stumps", 0.69), ("frequency", 0.55)]),
        ("support", [("logistic", 0.60), ("stumps", 0.62), ("frequency", 0.60)]),
    ];
    let table: ScoreTable = scores
        .iter()
        .map(|(d, row)| (d.to_string(), row.iter().map(|(m, v)| (m.to_string(), *v)).collect()))
        .collect();

    let config = EloConfig::default();
    println!("two models, one win: {:?}", elo_arena(&[0.7, 0.6], true, &config));

    let elo = elo_ratings(&table, true, &config)?;
    let ranks = average_rank(&table, true)?;
    let mut order: Vec<&String> = elo.keys().collect();
    order.sort_by(|a, b| elo[*b].total_cmp(&elo[*a]));
    println!("{:<10} {:>8} {:>9}", "model", "elo", "avg rank");
    for m in order {
        println!("{m:<10} {:>8.1} {:>9.2}", elo[m], ranks[m]);
    }
    Ok(elo)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
