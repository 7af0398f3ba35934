//! Slip / volume-reduction operating curve and the metrics defined on it.
//!
//! Candidate thresholds are the distinct observed scores plus
//! [`SENTINEL`]. Sweeping them from low to high moves the operating point
//! from "everything inspected" (`v = 0, s = 0`) to "nothing inspected"
//! (`v = 1, s = 1`).
//!
//! For area-based metrics the discrete curve is read as a staircase:
//! on `(v_i, v_{i+1}]` the height `1 - s` is the best height achievable by
//! an operating point at `v_{i+1}`. Every height on the staircase is
//! therefore backed by a threshold that delivers at least that volume
//! reduction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{youden_from_rates, ConfusionCounts, TargetSpec, SENTINEL};

/// Classifier scores paired with ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScores {
    scores: Vec<f64>,
    labels: Vec<u8>,
}

impl LabeledScores {
    pub fn new(scores: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
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
        if let Some(s) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::input(format!("score {s} outside [0, 1]")));
        }
        if let Some(l) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::input(format!("label {l} is not 0 or 1")));
        }
        Ok(Self { scores, labels })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    fn require_both_classes(&self) -> Result<()> {
        let pos = self.positives();
        if pos == 0 || pos == self.len() {
            return Err(Error::input("operating curve needs both defects and false calls"));
        }
        Ok(())
    }

    /// Confusion counts at each distinct score, highest score first.
    fn cumulative_by_descending_score(&self) -> Vec<(f64, ConfusionCounts)> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]));
        let pos = self.positives() as u64;
        let neg = self.len() as u64 - pos;
        let mut out: Vec<(f64, ConfusionCounts)> = Vec::new();
        let (mut tp, mut fp) = (0u64, 0u64);
        for (i, &idx) in order.iter().enumerate() {
            if self.labels[idx] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            let last_of_group = order
                .get(i + 1)
                .is_none_or(|&next| self.scores[next] != self.scores[idx]);
            if last_of_group {
                out.push((self.scores[idx], ConfusionCounts::new(tp, fp, neg - fp, pos - tp)));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    #[serde(with = "crate::serde_threshold")]
    pub threshold: f64,
    pub v: f64,
    pub s: f64,
    pub counts: ConfusionCounts,
}

/// Achievable operating points ordered by ascending threshold, which is
/// also ascending `v` with non-decreasing `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingCurve {
    points: Vec<OperatingPoint>,
}

impl OperatingCurve {
    pub fn points(&self) -> &[OperatingPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Staircase as `(v_left, v_right, height)` segments covering `(0, 1]`.
    fn steps(&self) -> Vec<(f64, f64, f64)> {
        // distinct v values with the best height reached at each
        let mut levels: Vec<(f64, f64)> = Vec::new();
        for p in &self.points {
            let h = 1.0 - p.s;
            match levels.last_mut() {
                Some((v, best)) if *v == p.v => *best = best.max(h),
                _ => levels.push((p.v, h)),
            }
        }
        levels.windows(2).map(|w| (w[0].0, w[1].0, w[1].1)).collect()
    }
}

/// Builds the operating curve over every achievable threshold.
pub fn sweep_thresholds(data: &LabeledScores) -> Result<OperatingCurve> {
    data.require_both_classes()?;
    let pos = data.positives() as u64;
    let neg = data.len() as u64 - pos;
    let mut points: Vec<OperatingPoint> = data
        .cumulative_by_descending_score()
        .into_iter()
        .rev()
        .map(|(t, cc)| point(t, cc))
        .collect();
    points.push(point(SENTINEL, ConfusionCounts::new(0, 0, neg, pos)));
    points.dedup_by(|later, earlier| later.v == earlier.v && later.s == earlier.s);
    Ok(OperatingCurve { points })
}

fn point(threshold: f64, cc: ConfusionCounts) -> OperatingPoint {
    // both classes are present, so the denominators are nonzero
    OperatingPoint {
        threshold,
        v: cc.tn as f64 / cc.negatives() as f64,
        s: cc.fn_ as f64 / cc.positives() as f64,
        counts: cc,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoudenScore {
    pub value: f64,
    #[serde(with = "crate::serde_threshold")]
    pub threshold: f64,
}

/// Maximum Youden index over the curve; ties go to the smallest threshold.
pub fn best_youden(curve: &OperatingCurve) -> Result<YoudenScore> {
    let mut best: Option<YoudenScore> = None;
    for p in curve.points() {
        let value = youden_from_rates(p.s, p.v);
        if best.is_none_or(|b| value > b.value) {
            best = Some(YoudenScore {
                value,
                threshold: p.threshold,
            });
        }
    }
    best.ok_or_else(|| Error::input("empty operating curve"))
}

/// Average precision: step-wise area under the precision-recall points,
/// precision taken at the right end of each recall increment.
pub fn auc_pr(data: &LabeledScores) -> Result<f64> {
    data.require_both_classes()?;
    let pos = data.positives() as f64;
    let mut area = 0.0;
    let mut prev_recall = 0.0;
    for (_, cc) in data.cumulative_by_descending_score() {
        let recall = cc.tp as f64 / pos;
        let precision = cc.tp as f64 / (cc.tp + cc.fp) as f64;
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    Ok(area)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeAtSlip {
    pub value: f64,
    /// `None` when no threshold removes any false call within the slip target.
    #[serde(with = "crate::serde_threshold::option")]
    pub threshold: Option<f64>,
}

/// Largest volume reduction among points with `s <= s_target`.
///
/// Ties on `v` go to the smaller slip rate, then to the smaller threshold.
pub fn v_at_s(curve: &OperatingCurve, targets: &TargetSpec) -> VolumeAtSlip {
    let mut best: Option<&OperatingPoint> = None;
    for p in curve.points().iter().filter(|p| p.s <= targets.s_target) {
        let better = best.is_none_or(|b| p.v > b.v || (p.v == b.v && p.s < b.s));
        if better {
            best = Some(p);
        }
    }
    match best {
        Some(p) if p.v > 0.0 => VolumeAtSlip {
            value: p.v,
            threshold: Some(p.threshold),
        },
        _ => VolumeAtSlip {
            value: 0.0,
            threshold: None,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaucCase {
    /// Some threshold lands inside the target zone.
    TargetReached,
    /// The staircase overlaps the zone but no threshold lands inside it.
    Intersects,
    /// The staircase stays below the zone.
    Gap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cauc {
    pub value: f64,
    pub case: CaucCase,
}

/// Constrained area under the slip / volume-reduction curve.
///
/// The target zone is `v >= v_target, 1 - s >= 1 - s_target`. When a
/// threshold reaches the zone, the value is the fraction of the zone lying
/// under the staircase, in `[0, 1]`. When the staircase stays below the
/// zone, the value is minus the relative gap between the staircase
/// (clipped at the zone floor) and the floor over `[0, v_target]`, in
/// `[-1, 0)`.
pub fn cauc(curve: &OperatingCurve, targets: &TargetSpec) -> Cauc {
    let floor = 1.0 - targets.s_target;
    let reached = curve
        .points()
        .iter()
        .any(|p| p.s <= targets.s_target && p.v >= targets.v_target);

    let steps = curve.steps();
    let overlap = |lo: f64, hi: f64| (hi.min(1.0) - lo.max(0.0)).max(0.0);
    let zone_area_under: f64 = steps
        .iter()
        .map(|&(l, r, h)| overlap(l.max(targets.v_target), r) * (h - floor).max(0.0))
        .sum();

    if reached {
        // zone height as `1 - floor` so a fully covered zone gives exactly 1
        let zone_area = (1.0 - targets.v_target) * (1.0 - floor);
        return Cauc {
            value: (zone_area_under / zone_area).min(1.0),
            case: CaucCase::TargetReached,
        };
    }
    if zone_area_under > 0.0 {
        return Cauc {
            value: 0.0,
            case: CaucCase::Intersects,
        };
    }
    let clipped: f64 = steps
        .iter()
        .map(|&(l, r, h)| overlap(l, r.min(targets.v_target)) * h.min(floor))
        .sum();
    let full = targets.v_target * floor;
    Cauc {
        value: (clipped - full) / full,
        case: CaucCase::Gap,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    Youden,
    VAtS(TargetSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdChoice {
    #[serde(with = "crate::serde_threshold")]
    pub threshold: f64,
    /// False when the criterion has no qualifying point; the threshold is
    /// then [`SENTINEL`].
    pub feasible: bool,
}

pub fn threshold_for_metric(curve: &OperatingCurve, criterion: Criterion) -> Result<ThresholdChoice> {
    match criterion {
        Criterion::Youden => best_youden(curve).map(|y| ThresholdChoice {
            threshold: y.threshold,
            feasible: true,
        }),
        Criterion::VAtS(targets) => Ok(match v_at_s(curve, &targets).threshold {
            Some(threshold) => ThresholdChoice {
                threshold,
                feasible: true,
            },
            None => ThresholdChoice {
                threshold: SENTINEL,
                feasible: false,
            },
        }),
    }
}

/// Threshold-free and best-threshold metrics for one evaluation set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveMetrics {
    pub auc_pr: f64,
    pub youden: YoudenScore,
    pub v_at_s: VolumeAtSlip,
    pub cauc: Cauc,
}

impl CurveMetrics {
    pub fn compute(data: &LabeledScores, targets: &TargetSpec) -> Result<Self> {
        let curve = sweep_thresholds(data)?;
        Self::from_curve(data, &curve, targets)
    }

    pub fn from_curve(data: &LabeledScores, curve: &OperatingCurve, targets: &TargetSpec) -> Result<Self> {
        Ok(Self {
            auc_pr: auc_pr(data)?,
            youden: best_youden(curve)?,
            v_at_s: v_at_s(curve, targets),
            cauc: cauc(curve, targets),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn six() -> LabeledScores {
        LabeledScores::new(vec![0.9, 0.4, 0.8, 0.3, 0.2, 0.1], vec![1, 1, 0, 0, 0, 0]).unwrap()
    }

    fn perfect() -> LabeledScores {
        LabeledScores::new(vec![0.9, 0.8, 0.3, 0.2, 0.1], vec![1, 1, 0, 0, 0]).unwrap()
    }

    fn constant(n_pos: usize, n_neg: usize) -> LabeledScores {
        let mut labels = vec![1; n_pos];
        labels.extend(vec![0; n_neg]);
        LabeledScores::new(vec![0.0; n_pos + n_neg], labels).unwrap()
    }

    #[test]
    fn labeled_scores_validation() {
        assert!(LabeledScores::new(vec![0.1], vec![]).is_err());
        assert!(LabeledScores::new(vec![], vec![]).is_err());
        assert!(LabeledScores::new(vec![1.5], vec![1]).is_err());
        assert!(LabeledScores::new(vec![0.5], vec![3]).is_err());
    }

    #[test]
    fn single_class_is_rejected() {
        let only_negatives = LabeledScores::new(vec![0.1, 0.2], vec![0, 0]).unwrap();
        assert!(sweep_thresholds(&only_negatives).is_err());
        assert!(auc_pr(&only_negatives).is_err());
    }

    #[test]
    fn six_sample_sweep() {
        let curve = sweep_thresholds(&six()).unwrap();
        assert_eq!(curve.len(), 7);
        let at = curve.points().iter().find(|p| p.threshold == 0.4).unwrap();
        assert_eq!((at.v, at.s), (0.75, 0.0));
        let first = curve.points()[0];
        assert_eq!((first.v, first.s), (0.0, 0.0));
        let last = curve.points()[6];
        assert_eq!((last.v, last.s, last.threshold), (1.0, 1.0, SENTINEL));
    }

    #[test]
    fn six_sample_best_threshold_metrics() {
        let curve = sweep_thresholds(&six()).unwrap();
        let y = best_youden(&curve).unwrap();
        assert_eq!((y.value, y.threshold), (0.75, 0.4));
        let vs = v_at_s(&curve, &TargetSpec::default());
        assert_eq!((vs.value, vs.threshold), (0.75, Some(0.4)));
        assert_eq!(threshold_for_metric(&curve, Criterion::Youden).unwrap().threshold, 0.4);
        let c = threshold_for_metric(&curve, Criterion::VAtS(TargetSpec::default())).unwrap();
        assert_eq!((c.threshold, c.feasible), (0.4, true));
    }

    #[test]
    fn constant_scores_give_two_points() {
        let curve = sweep_thresholds(&constant(8, 992)).unwrap();
        let vs: Vec<(f64, f64)> = curve.points().iter().map(|p| (p.v, p.s)).collect();
        assert_eq!(vs, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(best_youden(&curve).unwrap().value, 0.0);
        let t = TargetSpec::default();
        let vs = v_at_s(&curve, &t);
        assert_eq!((vs.value, vs.threshold), (0.0, None));
        let c = threshold_for_metric(&curve, Criterion::VAtS(t)).unwrap();
        assert_eq!((c.threshold, c.feasible), (SENTINEL, false));
        let area = cauc(&curve, &t);
        assert_eq!(area.case, CaucCase::Gap);
        assert_eq!(area.value, -1.0);
    }

    #[test]
    fn constant_scores_auc_pr_is_prevalence() {
        let data = constant(3, 17);
        assert!((auc_pr(&data).unwrap() - 0.15).abs() < 1e-15);
    }

    #[test]
    fn perfect_separation() {
        let data = perfect();
        let curve = sweep_thresholds(&data).unwrap();
        assert!(curve.points().iter().any(|p| p.v == 1.0 && p.s == 0.0));
        assert_eq!(best_youden(&curve).unwrap().value, 1.0);
        let t = TargetSpec::default();
        assert_eq!(v_at_s(&curve, &t).value, 1.0);
        let area = cauc(&curve, &t);
        assert_eq!(area.case, CaucCase::TargetReached);
        assert!((area.value - 1.0).abs() < 1e-12);
        assert_eq!(auc_pr(&data).unwrap(), 1.0);
    }

    #[test]
    fn cauc_partial_target_area() {
        // 1 defect, 10 false calls; the defect is caught up to v = 0.7
        let mut scores = vec![0.65];
        scores.extend((0..10).map(|i| i as f64 / 10.0));
        let mut labels = vec![1];
        labels.extend(vec![0; 10]);
        let data = LabeledScores::new(scores, labels).unwrap();
        let t = TargetSpec::default();
        let area = cauc(&sweep_thresholds(&data).unwrap(), &t);
        assert_eq!(area.case, CaucCase::TargetReached);
        // zone spans v in [0.4, 1]; full height up to v = 0.7
        assert!((area.value - 0.5).abs() < 1e-12, "{}", area.value);
    }

    /// Per-cell evaluation of the staircase, written without the curve's
    /// segment machinery.
    fn staircase_height(data: &LabeledScores, v: f64) -> f64 {
        let mut thresholds: Vec<f64> = data.scores().to_vec();
        thresholds.push(SENTINEL);
        thresholds
            .into_iter()
            .filter_map(|t| {
                let cc = ConfusionCounts::from_scores(data.scores(), data.labels(), t).unwrap();
                let pv = cc.tn as f64 / cc.negatives() as f64;
                let ps = cc.fn_ as f64 / cc.positives() as f64;
                (pv >= v).then_some(1.0 - ps)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn cauc_gap_matches_midpoint_sum() {
        // 10 false calls, so every step edge is a multiple of 0.1
        let data = LabeledScores::new(
            vec![0.3, 0.55, 0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            vec![1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        )
        .unwrap();
        let t = TargetSpec::default();
        let area = cauc(&sweep_thresholds(&data).unwrap(), &t);
        assert_eq!(area.case, CaucCase::Gap);
        let n = 4000;
        let width = t.v_target / n as f64;
        let clipped: f64 = (0..n)
            .map(|i| staircase_height(&data, (i as f64 + 0.5) * width).min(1.0 - t.s_target) * width)
            .sum();
        let full = t.v_target * (1.0 - t.s_target);
        assert!((area.value - (clipped - full) / full).abs() < 1e-9);
    }

    fn dataset() -> impl Strategy<Value = LabeledScores> {
        proptest::collection::vec((0u32..20, 0u8..2), 2..60)
            .prop_filter("both classes", |v| {
                v.iter().any(|x| x.1 == 1) && v.iter().any(|x| x.1 == 0)
            })
            .prop_map(|v| {
                let (s, l): (Vec<u32>, Vec<u8>) = v.into_iter().unzip();
                LabeledScores::new(s.into_iter().map(|x| f64::from(x) / 19.0).collect(), l).unwrap()
            })
    }

    proptest! {
        #[test]
        fn curve_is_monotone(data in dataset()) {
            let curve = sweep_thresholds(&data).unwrap();
            for w in curve.points().windows(2) {
                prop_assert!(w[0].threshold < w[1].threshold);
                prop_assert!(w[0].v <= w[1].v);
                prop_assert!(1.0 - w[0].s >= 1.0 - w[1].s);
            }
        }

        #[test]
        fn metrics_invariant_under_increasing_transform(data in dataset()) {
            let t = TargetSpec::new(0.1, 0.4).unwrap();
            let squashed = LabeledScores::new(
                data.scores().iter().map(|s| s * s * 0.5 + 0.25).collect(),
                data.labels().to_vec(),
            ).unwrap();
            let a = CurveMetrics::compute(&data, &t).unwrap();
            let b = CurveMetrics::compute(&squashed, &t).unwrap();
            prop_assert_eq!(a.youden.value, b.youden.value);
            prop_assert_eq!(a.v_at_s.value, b.v_at_s.value);
            prop_assert_eq!(a.auc_pr, b.auc_pr);
            prop_assert_eq!(a.cauc, b.cauc);
        }

        #[test]
        fn ranges_and_case_relationships(data in dataset(), s_t in 0.01f64..0.6, v_t in 0.05f64..0.95) {
            let t = TargetSpec::new(s_t, v_t).unwrap();
            let curve = sweep_thresholds(&data).unwrap();
            let area = cauc(&curve, &t);
            let vs = v_at_s(&curve, &t);
            prop_assert!((-1.0..=1.0 + 1e-12).contains(&area.value));
            prop_assert!((0.0..=1.0).contains(&vs.value));
            match area.case {
                CaucCase::TargetReached => prop_assert!(area.value >= 0.0),
                CaucCase::Gap => prop_assert!(area.value < 0.0),
                CaucCase::Intersects => prop_assert_eq!(area.value, 0.0),
            }
            prop_assert_eq!(area.case == CaucCase::TargetReached, vs.value >= v_t);
            for p in curve.points().iter().filter(|p| p.s <= s_t) {
                prop_assert!(vs.value >= p.v);
            }
            let ap = auc_pr(&data).unwrap();
            prop_assert!(ap > 0.0 && ap <= 1.0 + 1e-12);
        }
    }
}
