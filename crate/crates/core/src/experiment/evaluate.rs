use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curves::{sweep_thresholds, CurveMetrics, LabeledScores, OperatingCurve};
use crate::dataset::csv_io::{csv_err, find_column, parse_timestamp};
use crate::dataset::split::contiguous_slices;
use crate::error::{Error, Result};
use crate::metrics::{ConfusionCounts, MetricReport, TargetSpec};

/// Metrics of one scored evaluation set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub set: String,
    pub n_rows: usize,
    pub n_defects: usize,
    #[serde(with = "crate::serde_threshold::option")]
    pub threshold: Option<f64>,
    /// Threshold-dependent metrics; present only with an a-priori threshold.
    pub metrics: Option<MetricReport>,
    pub curve: CurveMetrics,
}

impl EvaluationReport {
    pub fn new(
        set: impl Into<String>,
        data: &LabeledScores,
        curve: &OperatingCurve,
        threshold: Option<f64>,
        targets: &TargetSpec,
    ) -> Result<Self> {
        let metrics = match threshold {
            Some(t) => {
                let cc = ConfusionCounts::from_scores(data.scores(), data.labels(), t)?;
                Some(MetricReport::from_counts(&cc, targets)?)
            }
            None => None,
        };
        Ok(Self {
            set: set.into(),
            n_rows: data.len(),
            n_defects: data.positives(),
            threshold,
            metrics,
            curve: CurveMetrics::from_curve(data, curve, targets)?,
        })
    }

    pub fn value(&self, metric: MetricName) -> Option<f64> {
        let m = self.metrics.as_ref();
        match metric {
            MetricName::Accuracy => m.map(|m| m.accuracy),
            MetricName::Precision => m.map(|m| m.precision),
            MetricName::Recall => m.map(|m| m.recall_pos),
            MetricName::F1 => m.map(|m| m.f1),
            MetricName::Cv => m.map(|m| m.cv),
            MetricName::Slip => m.map(|m| m.slip_rate),
            MetricName::VolumeReduction => m.map(|m| m.volume_reduction),
            MetricName::Prc => Some(self.curve.auc_pr),
            MetricName::Youden => Some(self.curve.youden.value),
            MetricName::VAtS => Some(self.curve.v_at_s.value),
            MetricName::Cauc => Some(self.curve.cauc.value),
        }
    }
}

/// Report columns. Parsing is case-insensitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricName {
    #[serde(rename = "accuracy")]
    Accuracy,
    #[serde(rename = "precision")]
    Precision,
    #[serde(rename = "recall")]
    Recall,
    #[serde(rename = "f1")]
    F1,
    #[serde(rename = "prc")]
    Prc,
    #[serde(rename = "youden")]
    Youden,
    #[serde(rename = "v@s")]
    VAtS,
    #[serde(rename = "cv")]
    Cv,
    #[serde(rename = "cauc")]
    Cauc,
    #[serde(rename = "slip")]
    Slip,
    #[serde(rename = "volume_reduction")]
    VolumeReduction,
}

impl MetricName {
    pub const ALL: [MetricName; 11] = [
        Self::Accuracy,
        Self::Precision,
        Self::Recall,
        Self::F1,
        Self::Prc,
        Self::Youden,
        Self::VAtS,
        Self::Cv,
        Self::Cauc,
        Self::Slip,
        Self::VolumeReduction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Accuracy => "accuracy",
            Self::Precision => "precision",
            Self::Recall => "recall",
            Self::F1 => "f1",
            Self::Prc => "prc",
            Self::Youden => "youden",
            Self::VAtS => "v@s",
            Self::Cv => "cv",
            Self::Cauc => "cauc",
            Self::Slip => "slip",
            Self::VolumeReduction => "volume_reduction",
        }
    }

    /// Needs a decision threshold.
    pub fn at_threshold(self) -> bool {
        !matches!(self, Self::Prc | Self::Youden | Self::VAtS | Self::Cauc)
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase();
        let alias = match wanted.as_str() {
            "auc_pr" | "auc-pr" => "prc",
            "vats" | "v_at_s" => "v@s",
            "volume" => "volume_reduction",
            other => other,
        };
        Self::ALL
            .into_iter()
            .find(|m| m.name() == alias)
            .ok_or_else(|| Error::input(format!("unknown metric {s:?}")))
    }
}

/// Result of evaluating an externally produced score file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalEvaluation {
    pub overall: EvaluationReport,
    #[serde(skip)]
    pub curve: Option<OperatingCurve>,
    pub slices: Vec<EvaluationReport>,
}

struct ScoreRow {
    score: f64,
    label: u8,
    timestamp: Option<i64>,
}

fn read_scores(path: &Path, need_timestamp: bool) -> Result<Vec<ScoreRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    let score_col = find_column(&headers, "score", path)?;
    let label_col = find_column(&headers, "label", path)?;
    let ts_col = if need_timestamp {
        Some(find_column(&headers, "timestamp", path)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| rec.get(i).unwrap_or("");
        let score: f64 = field(score_col)
            .parse()
            .map_err(|_| Error::ingestion(path, line, format!("score {:?} is not a number", field(score_col))))?;
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::ingestion(path, line, format!("score {score} outside [0, 1]")));
        }
        let label = match field(label_col) {
            "0" => 0,
            "1" => 1,
            other => return Err(Error::ingestion(path, line, format!("label {other:?} is not 0 or 1"))),
        };
        let timestamp = match ts_col {
            Some(c) => Some(
                parse_timestamp(field(c))
                    .ok_or_else(|| Error::ingestion(path, line, format!("unparseable timestamp {:?}", field(c))))?,
            ),
            None => None,
        };
        rows.push(ScoreRow {
            score,
            label,
            timestamp,
        });
    }
    if rows.is_empty() {
        return Err(Error::ingestion(path, 1, "no data rows"));
    }
    Ok(rows)
}

fn scored(rows: &[ScoreRow]) -> Result<LabeledScores> {
    LabeledScores::new(
        rows.iter().map(|r| r.score).collect(),
        rows.iter().map(|r| r.label).collect(),
    )
}

/// Scores a CSV with `score` and `label` columns. Threshold-dependent
/// metrics appear only when `threshold` is given. With `slices`, rows are
/// ordered by the `timestamp` column and cut into that many contiguous
/// chronological slices, each reported separately.
pub fn evaluate_external(
    path: impl AsRef<Path>,
    targets: &TargetSpec,
    threshold: Option<f64>,
    slices: Option<usize>,
) -> Result<ExternalEvaluation> {
    let path = path.as_ref();
    targets.validate()?;
    if let Some(t) = threshold {
        if !(0.0..=1.0).contains(&t) && t != f64::INFINITY {
            return Err(Error::input(format!("threshold {t} outside [0, 1]")));
        }
    }
    let mut rows = read_scores(path, slices.is_some())?;
    let data = scored(&rows)?;
    let curve = sweep_thresholds(&data)?;
    let overall = EvaluationReport::new("all", &data, &curve, threshold, targets)?;

    let mut slice_reports = Vec::new();
    if let Some(k) = slices {
        if k == 0 || k > rows.len() {
            return Err(Error::input(format!("cannot cut {} rows into {k} slices", rows.len())));
        }
        rows.sort_by_key(|r| r.timestamp);
        for (i, idx) in contiguous_slices(0, rows.len(), k).into_iter().enumerate() {
            let part: Vec<ScoreRow> = idx
                .iter()
                .map(|&j| ScoreRow {
                    score: rows[j].score,
                    label: rows[j].label,
                    timestamp: rows[j].timestamp,
                })
                .collect();
            let name = format!("slice{}", i + 1);
            let data = scored(&part)?;
            let curve = sweep_thresholds(&data).map_err(|e| Error::input(format!("{name}: {e}")))?;
            slice_reports.push(EvaluationReport::new(name, &data, &curve, threshold, targets)?);
        }
    }
    Ok(ExternalEvaluation {
        overall,
        curve: Some(curve),
        slices: slice_reports,
    })
}
