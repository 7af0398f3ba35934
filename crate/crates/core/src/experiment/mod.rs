//! The evaluation protocol: hyper-parameter search with stratified k-fold
//! cross-validation on the hyper-parameter set, a decision threshold
//! averaged over the folds of the best trial, a final fit on the whole
//! hyper-parameter set, then evaluation on the test set and the five
//! chronological slices at that fixed threshold. Repeated over seeds.
//!
//! Every random stream derives from the run seed by role: `"split"` for
//! the chronological split, `"kfold"` for the fold assignment,
//! `"optimizer"` for the search and `"model"` (indexed by trial) for
//! classifier randomness.

mod config;
mod evaluate;
mod optimizer;
mod separation;

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{train, ClassifierKind, ClassifierSpec, HyperParamSpace, TrainedModel, DUMMY_THRESHOLD};
use crate::curves::{
    auc_pr, cauc, sweep_thresholds, threshold_for_metric, Criterion, LabeledScores, OperatingCurve, ThresholdChoice,
};
use crate::dataset::{chrono_split, stratified_kfold, Dataset, EncodedMatrix, OneHotEncoder};
use crate::error::{Error, Result};
use crate::metrics::{TargetSpec, SENTINEL};
use crate::seed::{derive_seed, rng_for};

pub use config::{CsvSource, DataSource, ExperimentConfig, Regime};
pub use evaluate::{evaluate_external, EvaluationReport, ExternalEvaluation, MetricName};
pub use optimizer::{strategy, OptimizerKind, SearchStrategy};
pub use separation::{FrozenThreshold, LabelProbe, NoProbe, SealedLabels};

pub const TEST_SET: &str = "test";

pub fn slice_name(i: usize) -> String {
    format!("slice{}", i + 1)
}

/// One hyper-parameter candidate evaluated by k-fold cross-validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub index: usize,
    pub spec: ClassifierSpec,
    /// Optimization target per fold.
    pub fold_scores: Vec<f64>,
    pub fold_thresholds: Vec<ThresholdChoice>,
    pub mean_score: f64,
    /// Mean over feasible fold thresholds, [`SENTINEL`] if none is.
    #[serde(with = "crate::serde_threshold")]
    pub mean_threshold: f64,
    pub deployable: bool,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean of the feasible thresholds, or `None` when every fold is
/// infeasible.
pub fn mean_threshold(choices: &[ThresholdChoice]) -> Option<f64> {
    let feasible: Vec<f64> = choices
        .iter()
        .filter(|c| c.feasible && c.threshold.is_finite())
        .map(|c| c.threshold)
        .collect();
    (!feasible.is_empty()).then(|| mean(&feasible))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSettings {
    pub regime: Regime,
    pub targets: TargetSpec,
    pub optimizer: OptimizerKind,
    pub budget: usize,
    pub k_folds: usize,
}

impl From<&ExperimentConfig> for SearchSettings {
    fn from(cfg: &ExperimentConfig) -> Self {
        Self {
            regime: cfg.regime,
            targets: cfg.targets,
            optimizer: cfg.optimizer,
            budget: cfg.budget,
            k_folds: cfg.k_folds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best: TrialResult,
    pub trials: Vec<TrialResult>,
}

fn fold_result(
    spec: &ClassifierSpec,
    train_set: &EncodedMatrix,
    validation: &EncodedMatrix,
    settings: &SearchSettings,
) -> Result<(f64, ThresholdChoice)> {
    let model = train(spec, train_set)?;
    let scores = model.score(&validation.features)?;
    let data = LabeledScores::new(scores, validation.labels.clone())?;
    let curve = sweep_thresholds(&data)?;
    Ok(match settings.regime {
        Regime::Standard => (auc_pr(&data)?, threshold_for_metric(&curve, Criterion::Youden)?),
        Regime::RequirementAware => (
            cauc(&curve, &settings.targets).value,
            threshold_for_metric(&curve, Criterion::VAtS(settings.targets))?,
        ),
    })
}

/// Runs `settings.budget` trials and returns them all plus the one with the
/// highest mean fold score (earliest on ties).
pub fn optimize_hyperparams(
    kind: ClassifierKind,
    space: &HyperParamSpace,
    hyper: &EncodedMatrix,
    settings: &SearchSettings,
    seed: u64,
) -> Result<SearchOutcome> {
    if settings.budget == 0 {
        return Err(Error::input("search budget must be at least 1"));
    }
    let folds = stratified_kfold(&hyper.labels, settings.k_folds, seed)?;
    let fold_data: Vec<(EncodedMatrix, EncodedMatrix)> = folds
        .iter()
        .map(|f| (hyper.select(&f.train), hyper.select(&f.validation)))
        .collect();

    let mut rng = rng_for(seed, "optimizer", 0);
    let mut search = strategy(settings.optimizer, space.dims(kind));
    let mut trials: Vec<TrialResult> = Vec::with_capacity(settings.budget);
    for index in 0..settings.budget {
        let u = search.suggest(&mut rng);
        let spec = ClassifierSpec {
            params: space.decode(kind, &u)?,
            seed: derive_seed(seed, "model", index as u64),
        };
        let per_fold = fold_data
            .par_iter()
            .map(|(tr, va)| fold_result(&spec, tr, va, settings))
            .collect::<Vec<_>>()
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let (fold_scores, fold_thresholds): (Vec<f64>, Vec<ThresholdChoice>) = per_fold.into_iter().unzip();
        let mean_score = mean(&fold_scores);
        let t_bar = mean_threshold(&fold_thresholds);
        search.observe(u, mean_score);
        trials.push(TrialResult {
            index,
            spec,
            fold_scores,
            fold_thresholds,
            mean_score,
            mean_threshold: t_bar.unwrap_or(SENTINEL),
            deployable: t_bar.is_some(),
        });
    }
    let best = trials
        .iter()
        .fold(None::<&TrialResult>, |best, t| match best {
            Some(b) if b.mean_score >= t.mean_score => Some(b),
            _ => Some(t),
        })
        .cloned()
        .ok_or_else(|| Error::Invariant("search produced no trials".into()))?;
    Ok(SearchOutcome { best, trials })
}

/// Everything one seed of the protocol produces.
#[derive(Debug, Clone, Serialize)]
pub struct SeedRun {
    pub seed: u64,
    pub kind: ClassifierKind,
    pub regime: Regime,
    pub best_trial: TrialResult,
    pub n_trials: usize,
    /// Threshold applied to the test set and the slices.
    #[serde(with = "crate::serde_threshold")]
    pub threshold: f64,
    pub deployable: bool,
    pub test: EvaluationReport,
    pub slices: Vec<EvaluationReport>,
    #[serde(skip)]
    pub test_curve: OperatingCurve,
    #[serde(skip)]
    pub model: TrainedModel,
}

impl SeedRun {
    /// Test set followed by the slices.
    pub fn reports(&self) -> impl Iterator<Item = &EvaluationReport> {
        std::iter::once(&self.test).chain(&self.slices)
    }
}

pub fn run_algorithm1(cfg: &ExperimentConfig, ds: &Dataset, kind: ClassifierKind, seed: u64) -> Result<SeedRun> {
    run_algorithm1_with_probe(cfg, ds, kind, seed, &NoProbe)
}

/// [`run_algorithm1`] with label access reported to `probe`.
pub fn run_algorithm1_with_probe(
    cfg: &ExperimentConfig,
    ds: &Dataset,
    kind: ClassifierKind,
    seed: u64,
    probe: &dyn LabelProbe,
) -> Result<SeedRun> {
    let settings = SearchSettings::from(cfg);
    let plan = chrono_split(ds, seed)?;
    let encoder = OneHotEncoder::fit(ds, &plan.hyperparameter)?;
    let hyper = encoder.transform(ds, &plan.hyperparameter)?;

    let search = optimize_hyperparams(kind, &cfg.space, &hyper, &settings, seed)?;
    let best = search.best.clone();
    let mut model = train(&best.spec, &hyper)?;

    let mut held_out = vec![(TEST_SET.to_string(), plan.test)];
    held_out.extend(
        plan.slices
            .into_iter()
            .enumerate()
            .map(|(i, rows)| (slice_name(i), rows)),
    );
    let sets = held_out
        .into_iter()
        .map(|(name, rows)| {
            let (features, _) = encoder.transform_features(ds, &rows)?;
            let scores = model.score(&features)?;
            Ok((SealedLabels::seal(name, ds, rows), scores))
        })
        .collect::<Result<Vec<_>>>()?;

    let threshold = if kind == ClassifierKind::Dummy {
        DUMMY_THRESHOLD
    } else {
        best.mean_threshold
    };
    let frozen = FrozenThreshold::freeze(&mut model, threshold, probe)?;

    let mut reports = Vec::with_capacity(sets.len());
    let mut test_curve = None;
    for (labels, scores) in sets {
        let data = LabeledScores::new(scores, labels.open(&frozen, probe))?;
        let curve = sweep_thresholds(&data).map_err(|e| Error::Degenerate(format!("{}: {e}", labels.set())))?;
        reports.push(EvaluationReport::new(
            labels.set(),
            &data,
            &curve,
            Some(frozen.value()),
            &cfg.targets,
        )?);
        if test_curve.is_none() {
            test_curve = Some(curve);
        }
    }
    let test = reports.remove(0);
    Ok(SeedRun {
        seed,
        kind,
        regime: cfg.regime,
        deployable: kind == ClassifierKind::Dummy || best.deployable,
        best_trial: best,
        n_trials: search.trials.len(),
        threshold: frozen.value(),
        test,
        slices: reports,
        test_curve: test_curve.ok_or_else(|| Error::Invariant("no test curve".into()))?,
        model,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub n: usize,
}

impl MeanStd {
    pub fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let m = mean(xs);
        let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64;
        Some(Self {
            mean: m,
            std: var.sqrt(),
            n: xs.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSummary {
    pub set: String,
    pub metrics: BTreeMap<MetricName, MeanStd>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// Per-kind results over all configured seeds.
#[derive(Debug, Clone, Serialize)]
pub struct SeedAggregate {
    pub kind: ClassifierKind,
    pub regime: Regime,
    pub targets: TargetSpec,
    pub seeds: Vec<u64>,
    pub runs: Vec<SeedRun>,
    /// Test set first, then the slices in order.
    pub sets: Vec<SetSummary>,
    /// Seeds whose test-set cV reaches `v_target`.
    pub pass_count: usize,
    pub deployable_count: usize,
}

impl SeedAggregate {
    pub fn from_runs(kind: ClassifierKind, regime: Regime, targets: TargetSpec, runs: Vec<SeedRun>) -> Result<Self> {
        let first = runs.first().ok_or_else(|| Error::input("no seed runs to aggregate"))?;
        let names: Vec<String> = first.reports().map(|r| r.set.clone()).collect();
        let mut sets = Vec::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let mut metrics = BTreeMap::new();
            for metric in MetricName::ALL {
                let values: Vec<f64> = runs
                    .iter()
                    .filter_map(|r| r.reports().nth(i).and_then(|rep| rep.value(metric)))
                    .collect();
                if let Some(ms) = MeanStd::of(&values) {
                    metrics.insert(metric, ms);
                }
            }
            sets.push(SetSummary {
                set: name.clone(),
                metrics,
            });
        }
        let pass_count = runs
            .iter()
            .filter(|r| r.test.metrics.is_some_and(|m| m.meets_targets(&targets)))
            .count();
        Ok(Self {
            kind,
            regime,
            targets,
            seeds: runs.iter().map(|r| r.seed).collect(),
            deployable_count: runs.iter().filter(|r| r.deployable).count(),
            runs,
            sets,
            pass_count,
        })
    }

    pub fn set(&self, name: &str) -> Option<&SetSummary> {
        self.sets.iter().find(|s| s.set == name)
    }

    pub fn stat(&self, set: &str, metric: MetricName) -> Option<MeanStd> {
        self.set(set).and_then(|s| s.metrics.get(&metric).copied())
    }

    /// PASS when the mean test-set cV reaches `v_target`.
    pub fn verdict(&self) -> Verdict {
        match self.stat(TEST_SET, MetricName::Cv) {
            Some(cv) if cv.mean >= self.targets.v_target => Verdict::Pass,
            _ => Verdict::Fail,
        }
    }
}

/// Runs every configured seed for every configured model kind.
pub fn run_multi_seed(cfg: &ExperimentConfig, ds: &Dataset) -> Result<Vec<SeedAggregate>> {
    cfg.validate()?;
    let seeds = cfg.seeds();
    cfg.models
        .iter()
        .map(|&kind| {
            let runs = seeds
                .par_iter()
                .map(|&seed| {
                    run_algorithm1(cfg, ds, kind, seed).map_err(|e| Error::Seed {
                        seed,
                        source: Box::new(e),
                    })
                })
                .collect::<Vec<_>>()
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            SeedAggregate::from_runs(kind, cfg.regime, cfg.targets, runs)
        })
        .collect()
}

/// Loads the configured data (relative CSV paths resolve against
/// `base_dir`) and runs [`run_multi_seed`].
pub fn run_experiment(cfg: &ExperimentConfig, base_dir: &Path) -> Result<Vec<SeedAggregate>> {
    cfg.validate()?;
    let ds = cfg.data.load(base_dir)?;
    run_multi_seed(cfg, &ds)
}
