// Plugging an out-of-process classifier into the pipeline. The child speaks
// one JSON object per line on stdin/stdout; this one is a small Python
// program that memorizes per-row label means, so its answers can be checked
// against the in-process frequency classifier.

use std::path::Path;

use survstack::classify::{Classifier, ExternalClassifier, FrequencyClassifier};
use survstack::error::Result;
use survstack::grid::{expand_static, static_design};
use survstack::infer::{survival_static_batch, Target};
use survstack::synth::{gen_discrete, DiscreteTruth};

pub const SERVER: &str = r#"
import json, sys

table, fallback = None, None
for line in sys.stdin:
    msg = json.loads(line)
    op = msg.get("op")
    if op == "fit":
        sums = {}
        for row, y in zip(msg["features"], msg["labels"]):
            s, c = sums.get(tuple(row), (0, 0))
            sums[tuple(row)] = (s + y, c + 1)
        table = {k: s / c for k, (s, c) in sums.items()}
        fallback = sum(msg["labels"]) / len(msg["labels"])
        reply = {"ok": True}
    elif op == "predict":
        if table is None:
            reply = {"ok": False, "error": "not fitted"}
        else:
            reply = {"ok": True, "probs": [table.get(tuple(r), fallback) for r in msg["features"]]}
    elif op == "shutdown":
        print(json.dumps({"ok": True}), flush=True)
        break
    else:
        reply = {"ok": False, "error": "unknown op"}
    print(json.dumps(reply), flush=True)
"#;

/// Writes the server script into `dir` and returns the launch command.
pub fn install_server(dir: &Path) -> Result<String> {
    let path = dir.join("frequency_server.py");
    std::fs::write(&path, SERVER)?;
    Ok(format!("python3 {}", path.display()))
}

/// Largest difference between external and in-process survival estimates.
pub fn run_example() -> Result<f64> {
    let dir = std::env::temp_dir().join(format!("survstack-external-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let command = install_server(&dir)?;

    let truth = DiscreteTruth::four_cell();
    let grid = truth.grid()?;
    let records = gen_discrete(&truth, 2_000, 5)?;
    let (x, y) = static_design(&expand_static(&records, &grid))?;

    let mut external = ExternalClassifier::new(&command)?;
    external.fit(x.view(), &y)?;
    let mut local = FrequencyClassifier::new();
    local.fit(x.view(), &y)?;

    let remote = survival_static_batch(&external, &truth.support, &grid, Target::Failure)?;
    let here = survival_static_batch(&local, &truth.support, &grid, Target::Failure)?;
    let mut gap: f64 = 0.0;
    for (x, (a, b)) in truth.support.iter().zip(remote.iter().zip(&here)) {
        println!("x={x:?}: external {:?}", a.values);
        for (u, v) in a.values.iter().zip(&b.values) {
            gap = gap.max((u - v).abs());
        }
    }
    std::fs::remove_dir_all(&dir)?;
    println!("largest difference from the in-process classifier: {gap}");
    Ok(gap)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
