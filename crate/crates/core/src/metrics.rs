//! Threshold-dependent metrics computed from confusion counts.
//!
//! Label convention: `1` is a defect (positive), `0` is a false call
//! (negative). A sample is predicted defective iff `score >= threshold`.
//! Predicting "negative" means the board skips manual inspection, so
//! a missed defect is a *slip* and a correctly removed false call counts
//! towards *volume reduction*.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold above every score. Predicts every sample negative.
pub const SENTINEL: f64 = f64::INFINITY;

/// Business targets: maximum tolerated slip rate and minimum required
/// volume reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub s_target: f64,
    pub v_target: f64,
}

impl TargetSpec {
    pub fn new(s_target: f64, v_target: f64) -> Result<Self> {
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        if !open_unit(s_target) || !open_unit(v_target) {
            return Err(Error::input(format!(
                "targets must lie in (0, 1), got s_target={s_target}, v_target={v_target}"
            )));
        }
        Ok(Self { s_target, v_target })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.s_target, self.v_target).map(|_| ())
    }
}

impl Default for TargetSpec {
    fn default() -> Self {
        Self {
            s_target: 0.01,
            v_target: 0.40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        Self { tp, fp, tn, fn_ }
    }

    /// Counts for the rule "positive iff score >= threshold".
    pub fn from_scores(scores: &[f64], labels: &[u8], threshold: f64) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::input(format!(
                "{} scores but {} labels",
                scores.len(),
                labels.len()
            )));
        }
        if scores.is_empty() {
            return Err(Error::input("no samples"));
        }
        let mut cc = Self::default();
        for (&score, &label) in scores.iter().zip(labels) {
            match (label, score >= threshold) {
                (1, true) => cc.tp += 1,
                (1, false) => cc.fn_ += 1,
                (0, true) => cc.fp += 1,
                (0, false) => cc.tn += 1,
                (other, _) => return Err(Error::input(format!("label {other} is not 0 or 1"))),
            }
        }
        Ok(cc)
    }

    /// Counts from predicted labels.
    pub fn from_predictions(predicted: &[u8], labels: &[u8]) -> Result<Self> {
        let as_scores: Vec<f64> = predicted.iter().map(|&p| f64::from(p)).collect();
        Self::from_scores(&as_scores, labels, 0.5)
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> u64 {
        self.tn + self.fp
    }
}

/// `v = TN / (TN + FP)`, the recall of class 0.
pub fn volume_reduction(cc: &ConfusionCounts) -> Result<f64> {
    match cc.negatives() {
        0 => Err(Error::UndefinedRate("volume reduction needs at least one false call")),
        n => Ok(cc.tn as f64 / n as f64),
    }
}

/// `s = FN / (TP + FN)`, one minus the recall of class 1.
pub fn slip_rate(cc: &ConfusionCounts) -> Result<f64> {
    match cc.positives() {
        0 => Err(Error::UndefinedRate("slip rate needs at least one defect")),
        n => Ok(cc.fn_ as f64 / n as f64),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall_pos: f64,
    pub f1: f64,
}

/// Accuracy, precision, recall of class 1 and F1.
///
/// Precision and F1 are 0 when nothing is predicted positive.
pub fn standard_metrics(cc: &ConfusionCounts) -> Result<StandardMetrics> {
    if cc.total() == 0 {
        return Err(Error::input("empty confusion counts"));
    }
    let recall_pos = match cc.positives() {
        0 => return Err(Error::UndefinedRate("recall needs at least one defect")),
        n => cc.tp as f64 / n as f64,
    };
    let precision = match cc.tp + cc.fp {
        0 => 0.0,
        n => cc.tp as f64 / n as f64,
    };
    Ok(StandardMetrics {
        accuracy: (cc.tp + cc.tn) as f64 / cc.total() as f64,
        precision,
        recall_pos,
        f1: harmonic_mean(precision, recall_pos),
    })
}

fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Youden index `recall_0 + recall_1 - 1` at a fixed threshold.
pub fn youden_at(cc: &ConfusionCounts) -> Result<f64> {
    let v = volume_reduction(cc)?;
    let s = slip_rate(cc)?;
    Ok(youden_from_rates(s, v))
}

pub fn youden_from_rates(s: f64, v: f64) -> f64 {
    v + (1.0 - s) - 1.0
}

/// Constrained volume reduction at the set threshold.
///
/// Returns `s_target - s` when `s >= s_target` and `v` otherwise. The
/// comparison is taken literally, so a slip rate exactly at the target
/// yields 0; [`MetricReport::slip_at_target`] flags that case.
pub fn constrained_volume(cc: &ConfusionCounts, targets: &TargetSpec) -> Result<f64> {
    let v = volume_reduction(cc)?;
    let s = slip_rate(cc)?;
    Ok(constrained_volume_from_rates(s, v, targets))
}

pub fn constrained_volume_from_rates(s: f64, v: f64, targets: &TargetSpec) -> f64 {
    if s >= targets.s_target {
        targets.s_target - s
    } else {
        v
    }
}

/// All threshold-dependent metrics at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall_pos: f64,
    pub f1: f64,
    pub volume_reduction: f64,
    pub slip_rate: f64,
    pub youden_at_threshold: f64,
    pub cv: f64,
    /// Slip rate exactly equal to `s_target`: cV is 0 although the slip
    /// target is formally met.
    pub slip_at_target: bool,
    pub counts: ConfusionCounts,
}

impl MetricReport {
    pub fn from_counts(cc: &ConfusionCounts, targets: &TargetSpec) -> Result<Self> {
        let std = standard_metrics(cc)?;
        let v = volume_reduction(cc)?;
        let s = slip_rate(cc)?;
        Ok(Self {
            accuracy: std.accuracy,
            precision: std.precision,
            recall_pos: std.recall_pos,
            f1: std.f1,
            volume_reduction: v,
            slip_rate: s,
            youden_at_threshold: youden_from_rates(s, v),
            cv: constrained_volume_from_rates(s, v, targets),
            slip_at_target: s == targets.s_target,
            counts: *cc,
        })
    }

    /// Both business targets met at the set threshold.
    pub fn meets_targets(&self, targets: &TargetSpec) -> bool {
        self.cv >= targets.v_target
    }
}

/// One cell of the analytic metric surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCell {
    pub s: f64,
    pub v: f64,
    pub accuracy: f64,
    pub f1: f64,
    pub cv: f64,
}

/// Metrics at slip rate `s` and volume reduction `v` for a population with
/// defect prevalence `prevalence`, using confusion fractions
/// `tp = π(1-s)`, `fn = πs`, `tn = (1-π)v`, `fp = (1-π)(1-v)`.
pub fn surface_cell(prevalence: f64, s: f64, v: f64, targets: &TargetSpec) -> SurfaceCell {
    let tp = prevalence * (1.0 - s);
    let tn = (1.0 - prevalence) * v;
    let fp = (1.0 - prevalence) * (1.0 - v);
    let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
    SurfaceCell {
        s,
        v,
        accuracy: tp + tn,
        f1: harmonic_mean(precision, 1.0 - s),
        cv: constrained_volume_from_rates(s, v, targets),
    }
}

/// Metric surface on a `resolution x resolution` grid spanning
/// `s, v ∈ [0, 1]`. Cells are ordered by `s` then `v`.
pub fn metric_surface(prevalence: f64, resolution: usize, targets: &TargetSpec) -> Result<Vec<SurfaceCell>> {
    if !(prevalence > 0.0 && prevalence < 1.0) {
        return Err(Error::input(format!("prevalence {prevalence} outside (0, 1)")));
    }
    if resolution < 2 {
        return Err(Error::input("surface resolution must be at least 2"));
    }
    targets.validate()?;
    let step = 1.0 / (resolution - 1) as f64;
    let axis = |i: usize| if i == resolution - 1 { 1.0 } else { i as f64 * step };
    let mut cells = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        for j in 0..resolution {
            cells.push(surface_cell(prevalence, axis(i), axis(j), targets));
        }
    }
    Ok(cells)
}
