//! Acceptance run: one PASS/FAIL line per criterion, each timed against
//! its runtime budget. Exits non-zero if any criterion fails.

mod common;

use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use fcr_eval::classifiers::ClassifierKind;
use fcr_eval::curves::{best_youden, cauc, sweep_thresholds, v_at_s, CaucCase, LabeledScores};
use fcr_eval::dataset::{chrono_split, generate_synthetic, Dataset, SyntheticConfig};
use fcr_eval::experiment::{
    run_algorithm1, run_algorithm1_with_probe, run_multi_seed, slice_name, DataSource, ExperimentConfig, LabelProbe,
    MetricName, Regime, SeedAggregate, Verdict, TEST_SET,
};
use fcr_eval::metrics::{surface_cell, TargetSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_v_at_s, brute_youden, grid_cauc, random_set, GridCase};

type Check = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: fcr_eval::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn dc_oracle() -> Check {
    let ds = lib(generate_synthetic(&SyntheticConfig {
        n_rows: 10_000,
        prevalence: 0.008,
        ..SyntheticConfig::default()
    }))?;
    ensure(ds.positives() == 80, || format!("{} positives", ds.positives()))?;
    let mut lines = Vec::new();
    for regime in [Regime::Standard, Regime::RequirementAware] {
        let mut cfg = ExperimentConfig::new(vec![ClassifierKind::Dummy], DataSource::Synthetic(Default::default()));
        cfg.regime = regime;
        let run = lib(run_algorithm1(&cfg, &ds, ClassifierKind::Dummy, 0))?;
        let rep = &run.test;
        let m = rep.metrics.as_ref().ok_or("dummy run has no threshold metrics")?;
        let get = |name| rep.value(name).unwrap_or(f64::NAN);
        ensure((m.accuracy - 0.992).abs() <= 0.0005, || {
            format!("accuracy {}", m.accuracy)
        })?;
        ensure(m.f1 == 0.0, || format!("f1 {}", m.f1))?;
        ensure(get(MetricName::Youden) == 0.0, || {
            format!("youden {}", get(MetricName::Youden))
        })?;
        ensure(m.youden_at_threshold == 0.0, || {
            format!("youden at threshold {}", m.youden_at_threshold)
        })?;
        ensure(get(MetricName::VAtS) == 0.0, || {
            format!("v@s {}", get(MetricName::VAtS))
        })?;
        ensure(m.cv == -0.99, || format!("cv {}", m.cv))?;
        ensure(get(MetricName::Cauc) == -1.0, || {
            format!("cauc {}", get(MetricName::Cauc))
        })?;
        lines.push(format!(
            "{}: acc {:.4} cV {} cAUC {}",
            regime.name(),
            m.accuracy,
            m.cv,
            get(MetricName::Cauc)
        ));
    }
    Ok(lines.join("; "))
}

fn f1_edge() -> Check {
    let c = surface_cell(0.01, 0.011, 1.0, &TargetSpec::default());
    ensure((c.f1 - 0.9945).abs() <= 0.001, || format!("f1 {}", c.f1))?;
    ensure((c.cv + 0.001).abs() <= 1e-12, || format!("cv {}", c.cv))?;
    Ok(format!("f1 {:.5}, cV {:.6}", c.f1, c.cv))
}

fn cauc_grid() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let targets = TargetSpec::default();
    let (mut reached, mut intersects, mut gap) = (0, 0, 0);
    let mut worst: f64 = 0.0;
    let mut min_cells = usize::MAX;
    for i in 0..200 {
        let prevalence = [0.01, 0.05, 0.2][i % 3];
        let n = rng.random_range(20..=200);
        let (scores, labels) = random_set(&mut rng, n, prevalence);
        let (want, want_case, cells) = grid_cauc(&scores, &labels, 10_000);
        min_cells = min_cells.min(cells);
        let data = lib(LabeledScores::new(scores, labels))?;
        let got = cauc(&lib(sweep_thresholds(&data))?, &targets);
        let case_matches = matches!(
            (got.case, want_case),
            (CaucCase::TargetReached, GridCase::Reached)
                | (CaucCase::Intersects, GridCase::Intersects)
                | (CaucCase::Gap, GridCase::Gap)
        );
        ensure(case_matches, || {
            format!("set {i}: case {:?} vs oracle {want_case:?}", got.case)
        })?;
        let err = (got.value - want).abs();
        ensure(err <= 1e-6, || format!("set {i}: cauc {} vs oracle {want}", got.value))?;
        worst = worst.max(err);
        match want_case {
            GridCase::Reached => reached += 1,
            GridCase::Intersects => intersects += 1,
            GridCase::Gap => gap += 1,
        }
    }
    ensure(reached > 0 && gap > 0, || format!("cases reached {reached}, gap {gap}"))?;
    Ok(format!(
        "max |err| {worst:.1e} on >= {min_cells} cells; cases reached {reached}, intersects {intersects}, gap {gap}"
    ))
}

fn exhaustive_sweep() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let targets = TargetSpec::default();
    let mut feasible = 0;
    for i in 0..500 {
        let n = rng.random_range(2..=500);
        let prevalence = rng.random_range(0.005..0.5);
        let (scores, labels) = random_set(&mut rng, n, prevalence);
        let (yv, yt) = brute_youden(&scores, &labels);
        let (vv, vt) = brute_v_at_s(&scores, &labels, targets.s_target);
        let curve = lib(sweep_thresholds(&lib(LabeledScores::new(scores, labels))?))?;
        let y = lib(best_youden(&curve))?;
        let vs = v_at_s(&curve, &targets);
        ensure(y.value == yv && y.threshold == yt, || {
            format!("set {i}: youden {}@{} vs {yv}@{yt}", y.value, y.threshold)
        })?;
        ensure(vs.value == vv && vs.threshold == vt, || {
            format!("set {i}: v@s {}@{:?} vs {vv}@{vt:?}", vs.value, vs.threshold)
        })?;
        feasible += usize::from(vt.is_some());
    }
    Ok(format!("500 sets exact, {feasible} with a feasible V@S threshold"))
}

fn split_arithmetic() -> Check {
    for n in 100..=120usize {
        let ds = lib(generate_synthetic(&SyntheticConfig {
            n_rows: n,
            prevalence: 0.1,
            seed: n as u64,
            ..SyntheticConfig::default()
        }))?;
        let plan = lib(chrono_split(&ds, n as u64))?;
        let near = |got: usize, frac: f64| (got as f64 - frac * n as f64).abs() <= 1.0;
        ensure(near(plan.hyperparameter.len(), 0.4), || {
            format!("n {n}: hyper {}", plan.hyperparameter.len())
        })?;
        ensure(near(plan.test.len(), 0.1), || {
            format!("n {n}: test {}", plan.test.len())
        })?;
        ensure(plan.slices.len() == 5, || {
            format!("n {n}: {} slices", plan.slices.len())
        })?;
        for (i, s) in plan.slices.iter().enumerate() {
            ensure(near(s.len(), 0.1), || format!("n {n}: slice{} has {}", i + 1, s.len()))?;
        }
        let mut all: Vec<usize> = plan.hyperparameter.iter().chain(&plan.test).copied().collect();
        all.extend(plan.slices.iter().flatten());
        all.sort_unstable();
        ensure(all == (0..n).collect::<Vec<_>>(), || {
            format!("n {n}: sets overlap or miss rows")
        })?;
        let ts = |rows: &[usize]| rows.iter().map(|&r| ds.rows()[r].timestamp).collect::<Vec<_>>();
        let first_half_end = ts(&plan.hyperparameter)
            .into_iter()
            .chain(ts(&plan.test))
            .max()
            .unwrap();
        let mut prev_end = first_half_end;
        for s in &plan.slices {
            let t = ts(s);
            ensure(t.iter().all(|&x| x >= prev_end), || {
                format!("n {n}: slices out of order")
            })?;
            ensure(t.windows(2).all(|w| w[0] <= w[1]), || {
                format!("n {n}: slice not contiguous")
            })?;
            prev_end = *t.iter().max().unwrap();
        }
    }
    Ok("n = 100..=120 within +-1 row, disjoint, chronological".into())
}

fn late_clusters(class_separation: f64) -> SyntheticConfig {
    SyntheticConfig {
        n_rows: 10_000,
        prevalence: 0.01,
        n_clusters: 3,
        cluster_windows: vec![(0.0, 1.0), (0.5, 1.0), (0.5, 1.0)],
        class_separation,
        ..SyntheticConfig::default()
    }
}

fn aggregate(
    data: &SyntheticConfig,
    ds: &Dataset,
    kind: ClassifierKind,
    regime: Regime,
    n_seeds: usize,
) -> Result<SeedAggregate, String> {
    let mut cfg = ExperimentConfig::new(vec![kind], DataSource::Synthetic(data.clone()));
    cfg.regime = regime;
    cfg.n_seeds = n_seeds;
    lib(run_multi_seed(&cfg, ds))?
        .pop()
        .ok_or_else(|| "no aggregate".into())
}

fn regime_divergence() -> Check {
    let data = late_clusters(3.5);
    let ds = lib(generate_synthetic(&data))?;
    let kind = ClassifierKind::RandomForest;
    let standard = aggregate(&data, &ds, kind, Regime::Standard, 10)?;
    let aware = aggregate(&data, &ds, kind, Regime::RequirementAware, 10)?;
    let cv = |a: &SeedAggregate| a.stat(TEST_SET, MetricName::Cv).map_or(f64::NAN, |m| m.mean);
    let (s, r) = (cv(&standard), cv(&aware));
    let detail = format!(
        "mean test cV requirement-aware {r:.4} ({} pass) vs standard {s:.4} ({} pass)",
        aware.pass_count, standard.pass_count
    );
    ensure(r > s, || detail.clone())?;
    Ok(detail)
}

fn mean_slice_slip(a: &SeedAggregate) -> f64 {
    let slips: Vec<f64> = (0..5)
        .map(|i| a.stat(&slice_name(i), MetricName::Slip).map_or(f64::NAN, |m| m.mean))
        .collect();
    slips.iter().sum::<f64>() / slips.len() as f64
}

fn temporal_decay() -> Check {
    let targets = TargetSpec::default();
    let kind = ClassifierKind::Knn;
    let drifting = late_clusters(12.0);
    let stationary = SyntheticConfig {
        n_clusters: 1,
        cluster_windows: Vec::new(),
        ..drifting.clone()
    };
    let drift_agg = aggregate(
        &drifting,
        &lib(generate_synthetic(&drifting))?,
        kind,
        Regime::RequirementAware,
        5,
    )?;
    let control = aggregate(
        &stationary,
        &lib(generate_synthetic(&stationary))?,
        kind,
        Regime::RequirementAware,
        5,
    )?;
    let (d, c) = (mean_slice_slip(&drift_agg), mean_slice_slip(&control));
    let detail = format!(
        "drift: test {} mean slice slip {d:.3}; control: test {} mean slice slip {c:.3}",
        drift_agg.verdict(),
        control.verdict()
    );
    ensure(drift_agg.verdict() == Verdict::Pass, || detail.clone())?;
    ensure(d > targets.s_target, || detail.clone())?;
    ensure(c <= targets.s_target, || detail.clone())?;
    Ok(detail)
}

#[derive(Default)]
struct CountingProbe {
    events: Mutex<Vec<Option<String>>>,
}

impl LabelProbe for CountingProbe {
    fn threshold_frozen(&self, _t: f64) {
        self.events.lock().unwrap().push(None);
    }
    fn labels_opened(&self, set: &str) {
        self.events.lock().unwrap().push(Some(set.to_string()));
    }
}

fn a_priori_separation() -> Check {
    let data = SyntheticConfig {
        n_rows: 3_000,
        prevalence: 0.02,
        class_separation: 5.0,
        ..SyntheticConfig::default()
    };
    let ds = lib(generate_synthetic(&data))?;
    let mut cfg = ExperimentConfig::new(vec![ClassifierKind::Knn], DataSource::Synthetic(data));
    cfg.budget = 3;
    let probe = CountingProbe::default();
    let run = lib(run_algorithm1_with_probe(&cfg, &ds, ClassifierKind::Knn, 0, &probe))?;
    let events = probe.events.lock().unwrap().clone();
    let frozen_at = events
        .iter()
        .position(Option::is_none)
        .ok_or("threshold never frozen")?;
    let before = events[..frozen_at].iter().filter(|e| e.is_some()).count();
    let after: Vec<String> = events[frozen_at..].iter().flatten().cloned().collect();
    ensure(before == 0, || format!("{before} label reads before freeze"))?;
    let expected: Vec<String> = std::iter::once(TEST_SET.to_string())
        .chain((0..5).map(slice_name))
        .collect();
    ensure(after == expected, || format!("opened {after:?}"))?;

    // flipping every slice label must not move the selected threshold
    let cols = ds.columns().to_vec();
    let half = ds.len() / 2;
    let rows: Vec<_> = ds
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            if i >= half {
                r.label = 1 - r.label;
            }
            r
        })
        .collect();
    let flipped = lib(Dataset::new(ds.timestamp_column(), ds.label_column(), cols, rows))?;
    let other = lib(run_algorithm1(&cfg, &flipped, ClassifierKind::Knn, 0))?;
    ensure(
        other.threshold == run.threshold && other.best_trial == run.best_trial,
        || {
            format!(
                "threshold {} vs {} after flipping slice labels",
                other.threshold, run.threshold
            )
        },
    )?;
    Ok(format!(
        "0 reads before freeze, then {}; threshold unchanged by slice labels",
        after.join(",")
    ))
}

const DETERMINISM_CONFIG: &str = r#"
run_id = "det"
models = ["dummy", "knn", "random_forest"]
budget = 3
n_seeds = 2

[space]
n_trees = [5, 30]

[data]
source = "synthetic"
n_rows = 3000
prevalence = 0.02
class_separation = 4.0
n_clusters = 2
drift_strength = 0.5
"#;

fn json_files(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_some_and(|e| e == "json") {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            out.push((name, std::fs::read(&path).map_err(|e| e.to_string())?));
        }
    }
    out.sort();
    Ok(out)
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = tmp.path().join("det.toml");
    std::fs::write(&config, DETERMINISM_CONFIG).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_fcr"))
            .args(["experiment", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || {
            String::from_utf8_lossy(&status.stderr).into_owned()
        })?;
        outputs.push(json_files(&out.join("det"))?);
    }
    ensure(outputs[0].len() == 4, || format!("{} json files", outputs[0].len()))?;
    ensure(outputs[0] == outputs[1], || "json reports differ between runs".into())?;
    let bytes: usize = outputs[0].iter().map(|(_, b)| b.len()).sum();
    Ok(format!("{} json files, {bytes} bytes, identical", outputs[0].len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("dummy-classifier oracle", 1, dc_oracle),
        ("F1 misleading edge", 1, f1_edge),
        ("cAUC grid oracle", 30, cauc_grid),
        ("V@S and Youden exhaustive sweep", 30, exhaustive_sweep),
        ("split arithmetic", 1, split_arithmetic),
        ("metric-regime divergence", 600, regime_divergence),
        ("temporal-decay direction", 600, temporal_decay),
        ("a-priori separation", 1, a_priori_separation),
        ("determinism", 600, determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (ok, detail) = match result {
            Ok(d) if in_time => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget}s budget")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "{} {}. {name} [{:.2}s / {budget}s]: {detail}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
