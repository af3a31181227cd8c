//! Exhaustive reference implementations written straight from the
//! definitions, plus random censored instances to feed them.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use survstack::error::Error;

/// Why a reference computation has no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Missing {
    Undefined,
    NoSupport,
}

pub type Reference = Result<f64, Missing>;

/// Maps a library error onto the reference vocabulary.
pub fn classify(e: &Error) -> Missing {
    match e {
        Error::NoCensoringSupport(_) => Missing::NoSupport,
        Error::Undefined(_) | Error::NoComparablePairs => Missing::Undefined,
        other => panic!("unexpected error {other}"),
    }
}

/// `(t, S(t))` after every distinct event time, by direct counting.
pub fn product_limit(times: &[f64], events: &[bool]) -> Vec<(f64, f64)> {
    let mut distinct: Vec<f64> = times.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let mut s = 1.0;
    let mut out = Vec::new();
    for t in distinct {
        let at_risk = times.iter().filter(|&&u| u >= t).count();
        let deaths = times.iter().zip(events).filter(|(&u, &e)| u == t && e).count();
        if deaths > 0 {
            s *= 1.0 - deaths as f64 / at_risk as f64;
            out.push((t, s));
        }
    }
    out
}

pub fn censoring_curve(times: &[f64], events: &[bool]) -> Vec<(f64, f64)> {
    let flipped: Vec<bool> = events.iter().map(|e| !e).collect();
    product_limit(times, &flipped)
}

/// Step value at `t`, jumps at `t` included.
pub fn at(curve: &[(f64, f64)], t: f64) -> f64 {
    curve.iter().filter(|(u, _)| *u <= t).map(|&(_, v)| v).next_back().unwrap_or(1.0)
}

/// Step value just before `t`.
pub fn before(curve: &[(f64, f64)], t: f64) -> f64 {
    curve.iter().filter(|(u, _)| *u < t).map(|&(_, v)| v).next_back().unwrap_or(1.0)
}

fn credit(a: f64, b: f64) -> f64 {
    if a > b {
        1.0
    } else if a == b {
        0.5
    } else {
        0.0
    }
}

/// Truncated IPCW concordance over all ordered pairs among subjects alive
/// at `origin`, weights `G(T_i- | origin)^-2`.
pub fn cindex(origin: f64, risks: &[f64], times: &[f64], events: &[bool], g: &[(f64, f64)], t_max: f64) -> Reference {
    let g0 = at(g, origin);
    if g0 <= 0.0 {
        return Err(Missing::NoSupport);
    }
    let n = times.len();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        if times[i] <= origin || !events[i] || times[i] > t_max {
            continue;
        }
        let later: Vec<usize> = (0..n).filter(|&j| times[j] > times[i]).collect();
        if later.is_empty() {
            continue;
        }
        let gi = before(g, times[i]) / g0;
        if gi <= 0.0 {
            return Err(Missing::NoSupport);
        }
        for j in later {
            num += credit(risks[i], risks[j]) / (gi * gi);
            den += 1.0 / (gi * gi);
        }
    }
    if den == 0.0 {
        return Err(Missing::Undefined);
    }
    Ok(num / den)
}

/// Cumulative/dynamic AUC at `t` for subjects alive at `origin`.
pub fn auc(origin: f64, risks: &[f64], times: &[f64], events: &[bool], g: &[(f64, f64)], t: f64) -> Reference {
    let g0 = at(g, origin);
    if g0 <= 0.0 {
        return Err(Missing::NoSupport);
    }
    let n = times.len();
    let cases: Vec<usize> = (0..n).filter(|&i| events[i] && times[i] > origin && times[i] <= t).collect();
    let controls: Vec<usize> = (0..n).filter(|&j| times[j] > t && times[j] > origin).collect();
    if cases.is_empty() || controls.is_empty() {
        return Err(Missing::Undefined);
    }
    let (mut num, mut den) = (0.0, 0.0);
    for &i in &cases {
        let gi = before(g, times[i]) / g0;
        if gi <= 0.0 {
            return Err(Missing::NoSupport);
        }
        for &j in &controls {
            num += credit(risks[i], risks[j]) / gi;
            den += 1.0 / gi;
        }
    }
    Ok(num / den)
}

/// IPCW Brier score at `t` for subjects alive at `origin`.
pub fn brier(origin: f64, predictions: &[f64], times: &[f64], events: &[bool], g: &[(f64, f64)], t: f64) -> Reference {
    let g0 = at(g, origin);
    if g0 <= 0.0 {
        return Err(Missing::NoSupport);
    }
    let gt = at(g, t) / g0;
    if gt <= 0.0 {
        return Err(Missing::NoSupport);
    }
    let cohort: Vec<usize> = (0..times.len()).filter(|&i| times[i] > origin).collect();
    if cohort.is_empty() {
        return Err(Missing::Undefined);
    }
    let mut total = 0.0;
    for &i in &cohort {
        let s = predictions[i];
        if times[i] <= t && events[i] {
            let gi = before(g, times[i]) / g0;
            if gi <= 0.0 {
                return Err(Missing::NoSupport);
            }
            total += s * s / gi;
        } else if times[i] > t {
            total += (1.0 - s) * (1.0 - s) / gt;
        }
    }
    Ok(total / cohort.len() as f64)
}

/// AUCs at `eval_times` averaged with weights from the drop in the
/// conditional marginal survival over each step; undefined points skipped.
pub fn integrated_auc(
    origin: f64,
    risks: &[f64],
    times: &[f64],
    events: &[bool],
    g: &[(f64, f64)],
    s: &[(f64, f64)],
    eval_times: &[f64],
) -> Reference {
    let s0 = at(s, origin);
    if s0 <= 0.0 {
        return Err(Missing::Undefined);
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (j, &t) in eval_times.iter().enumerate() {
        let prev = if j == 0 { 1.0 } else { at(s, eval_times[j - 1]) / s0 };
        let w = prev - at(s, t) / s0;
        match auc(origin, risks, times, events, g, t) {
            Ok(a) if w > 0.0 => {
                num += a * w;
                den += w;
            }
            Ok(_) | Err(Missing::Undefined) => {}
            Err(e) => return Err(e),
        }
    }
    if den <= 0.0 {
        return Err(Missing::Undefined);
    }
    Ok(num / den)
}

pub struct Instance {
    pub times: Vec<f64>,
    pub events: Vec<bool>,
    pub risks: Vec<f64>,
    pub predictions: Vec<f64>,
}

/// Random censored sample of size `2..=max_n` on a coarse time lattice (so
/// times tie) with risks that sometimes tie as well.
pub fn instance(rng: &mut ChaCha8Rng, max_n: usize) -> Instance {
    let n = rng.random_range(2..=max_n);
    let event_rate: f64 = rng.random_range(0.2..0.95);
    let lattice = rng.random_range(3..20);
    let discrete_risk = rng.random_bool(0.5);
    let times = (0..n).map(|_| rng.random_range(1..=lattice) as f64 * 0.5).collect();
    let events = (0..n).map(|_| rng.random_bool(event_rate)).collect();
    let risks = (0..n)
        .map(|_| if discrete_risk { rng.random_range(0..5) as f64 } else { rng.random::<f64>() })
        .collect();
    let predictions = (0..n).map(|_| rng.random::<f64>()).collect();
    Instance {
        times,
        events,
        risks,
        predictions,
    }
}

pub fn agree(library: Result<f64, Error>, reference: Reference, tol: f64) -> bool {
    match (library, reference) {
        (Ok(a), Ok(b)) => (a - b).abs() <= tol,
        (Err(e), Err(m)) => classify(&e) == m,
        _ => false,
    }
}

use rand::SeedableRng;
use survstack::metrics::{
    auc_at_time, auc_from, brier_at_time, brier_from, censoring_km, cindex_from, cindex_ipcw, integrated_auc_from,
    kaplan_meier, MetricConfig,
};

fn pick(rng: &mut ChaCha8Rng, values: &[f64]) -> f64 {
    values[rng.random_range(0..values.len())]
}

/// Compares every IPCW estimator, static and landmark, with the references
/// on `count` random instances. Returns the number of comparisons made and
/// a description of each disagreement.
pub fn metric_oracle_check(count: usize, seed: u64) -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut compared = 0;
    let mut failures = Vec::new();
    for case in 0..count {
        let inst = instance(&mut rng, 50);
        let (t, e) = (&inst.times, &inst.events);
        let g_lib = censoring_km(t, e).unwrap();
        let s_lib = kaplan_meier(t, e).unwrap();
        let g = censoring_curve(t, e);
        let s = product_limit(t, e);
        let t_max = if rng.random_bool(0.5) { t.iter().copied().fold(0.0, f64::max) } else { pick(&mut rng, t) };
        let config = MetricConfig::new(t_max).unwrap();
        let mut lattice: Vec<f64> = t.clone();
        lattice.sort_by(f64::total_cmp);
        lattice.dedup();

        let mut check = |name: &str, lib: Result<f64, Error>, reference: Reference| {
            compared += 1;
            let shown = format!("{lib:?} vs {reference:?}");
            if !agree(lib, reference, 1e-10) {
                failures.push(format!("case {case} {name}: {shown}"));
            }
        };

        let h = pick(&mut rng, &lattice) + if rng.random_bool(0.3) { 0.25 } else { 0.0 };
        check("cindex", cindex_ipcw(&inst.risks, t, e, &g_lib, &config), cindex(0.0, &inst.risks, t, e, &g, t_max));
        check("auc", auc_at_time(&inst.risks, t, e, &g_lib, h), auc(0.0, &inst.risks, t, e, &g, h));
        check("brier", brier_at_time(&inst.predictions, t, e, &g_lib, h), brier(0.0, &inst.predictions, t, e, &g, h));

        let mut eval: Vec<f64> = (0..rng.random_range(1..5)).map(|_| pick(&mut rng, &lattice)).collect();
        eval.sort_by(f64::total_cmp);
        eval.dedup();
        for origin in [0.0, pick(&mut rng, &lattice), pick(&mut rng, &lattice) - 0.25] {
            let horizon = origin + h;
            let later: Vec<f64> = eval.iter().map(|x| x + origin).collect();
            check(
                "cindex_from",
                cindex_from(origin, &inst.risks, t, e, &g_lib, &config),
                cindex(origin, &inst.risks, t, e, &g, t_max),
            );
            check(
                "auc_from",
                auc_from(origin, &inst.risks, t, e, &g_lib, horizon),
                auc(origin, &inst.risks, t, e, &g, horizon),
            );
            check(
                "brier_from",
                brier_from(origin, &inst.predictions, t, e, &g_lib, horizon),
                brier(origin, &inst.predictions, t, e, &g, horizon),
            );
            check(
                "integrated_auc_from",
                integrated_auc_from(origin, &inst.risks, t, e, &g_lib, &s_lib, &later),
                integrated_auc(origin, &inst.risks, t, e, &g, &s, &later),
            );
        }
    }
    (compared, failures)
}

/// Kaplan-Meier against the counting product-limit on `count` instances of
/// size at most 30; values and jump times must match exactly.
pub fn km_oracle_check(count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for case in 0..count {
        let inst = instance(&mut rng, 30);
        for (name, flip) in [("survival", false), ("censoring", true)] {
            let events: Vec<bool> = inst.events.iter().map(|&x| x != flip).collect();
            let lib = kaplan_meier(&inst.times, &events).unwrap();
            let reference = product_limit(&inst.times, &events);
            let lib_points: Vec<(f64, f64)> = lib.jump_times().iter().copied().zip(lib.values().iter().copied()).collect();
            if lib_points != reference {
                failures.push(format!("case {case} {name}: {lib_points:?} vs {reference:?}"));
            }
        }
    }
    failures
}

type Transform = (&'static str, fn(f64) -> f64);

/// C-index and AUC under strictly increasing transforms of the risks.
pub fn rank_invariance_check(count: usize, seed: u64) -> Vec<String> {
    let transforms: [Transform; 3] = [
        ("exp", f64::exp),
        ("cubic", |r| r * r * r + 5.0 * r - 2.0),
        ("affine", |r| 1000.0 * r + 7.0),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for case in 0..count {
        let inst = instance(&mut rng, 50);
        let (t, e) = (&inst.times, &inst.events);
        let g = censoring_km(t, e).unwrap();
        let config = MetricConfig::from_training_times(t).unwrap();
        let h = pick(&mut rng, t);
        let base_c = cindex_ipcw(&inst.risks, t, e, &g, &config).ok();
        let base_a = auc_at_time(&inst.risks, t, e, &g, h).ok();
        for (name, f) in transforms {
            let mapped: Vec<f64> = inst.risks.iter().map(|&r| f(r)).collect();
            let c = cindex_ipcw(&mapped, t, e, &g, &config).ok();
            let a = auc_at_time(&mapped, t, e, &g, h).ok();
            if c != base_c || a != base_a {
                failures.push(format!("case {case} {name}: C {base_c:?} -> {c:?}, AUC {base_a:?} -> {a:?}"));
            }
        }
    }
    failures
}

/// Survival curves built from random classifier outputs: clipped failure
/// curves and hazard products are nonincreasing and clipping is idempotent.
pub fn monotonicity_check(count: usize, seed: u64) -> Vec<String> {
    use survstack::infer::{clip_monotone, survival_from_failure, survival_from_hazard, HazardCurve};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let nonincreasing = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0]);
    for case in 0..count {
        let m = rng.random_range(1..25);
        let p: Vec<f64> = (0..m)
            .map(|_| match rng.random_range(0..10) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.random::<f64>(),
            })
            .collect();
        let times: Vec<f64> = (1..=m).map(|k| k as f64).collect();
        let s = survival_from_failure(times.clone(), &p).unwrap().values;
        let h = survival_from_hazard(&HazardCurve { times, values: p.clone() }).values;
        let raw: Vec<f64> = p.iter().map(|x| 1.0 - x).collect();
        let once = clip_monotone(&raw);
        if !nonincreasing(&s) || s.iter().any(|v| !(0.0..=1.0).contains(v)) {
            failures.push(format!("case {case}: clipped curve {s:?}"));
        }
        if clip_monotone(&once) != once {
            failures.push(format!("case {case}: clipping not idempotent"));
        }
        if !nonincreasing(&h) {
            failures.push(format!("case {case}: hazard curve {h:?}"));
        }
    }
    failures
}

/// Relative error `|a - b| / (|a| + |b|)` of the analytic logistic gradient
/// against central differences of an independently written objective, for
/// each of `count` random problems.
pub fn gradient_check(count: usize, seed: u64) -> Vec<f64> {
    use ndarray::{Array1, Array2};
    use survstack::classify::logistic_objective;

    fn objective(w: &Array1<f64>, b: f64, x: &Array2<f64>, y: &[bool], l2: f64) -> f64 {
        let mut total = 0.0;
        for (row, &yi) in x.rows().into_iter().zip(y) {
            let z = row.dot(w) + b;
            let p = 1.0 / (1.0 + (-z).exp());
            total -= if yi { p.ln() } else { (1.0 - p).ln() };
        }
        total / y.len() as f64 + l2 * w.dot(w)
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-6;
    (0..count)
        .map(|_| {
            let n = rng.random_range(3..30);
            let d = rng.random_range(1..6);
            let x = Array2::from_shape_fn((n, d), |_| rng.random_range(-2.0..2.0));
            let y: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            let w = Array1::from_shape_fn(d, |_| rng.random_range(-1.0..1.0));
            let b = rng.random_range(-1.0..1.0);
            let l2 = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..0.1) };
            let (_, gw, gb) = logistic_objective(w.view(), b, x.view(), &y, l2);
            let mut analytic = gw.to_vec();
            analytic.push(gb);
            let mut numeric = Vec::with_capacity(d + 1);
            for j in 0..d {
                let (mut up, mut down) = (w.clone(), w.clone());
                up[j] += h;
                down[j] -= h;
                numeric.push((objective(&up, b, &x, &y, l2) - objective(&down, b, &x, &y, l2)) / (2.0 * h));
            }
            numeric.push((objective(&w, b + h, &x, &y, l2) - objective(&w, b - h, &x, &y, l2)) / (2.0 * h));
            let diff: f64 = analytic.iter().zip(&numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let scale: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt() + numeric.iter().map(|a| a * a).sum::<f64>().sqrt();
            diff / scale
        })
        .collect()
}
