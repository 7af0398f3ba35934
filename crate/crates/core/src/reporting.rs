//! Machine-readable report tables and plot-ready exports.
//!
//! Every export renders both as CSV (UTF-8, header row, numbers rounded to
//! three decimals for display) and as JSON (full precision). Experiment
//! bundles are written as `<run-id>/<table|curve|timeline|surface>.<csv|json>`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::curves::{cauc, CaucCase, OperatingCurve};
use crate::dataset::csv_io::csv_err;
use crate::dataset::{centroid_shift, one_hot_fit_transform, pca2d, Dataset, Standardizer};
use crate::error::{Error, Result};
use crate::experiment::{EvaluationReport, ExperimentConfig, MeanStd, MetricName, SeedAggregate, Verdict, TEST_SET};
use crate::metrics::{metric_surface, SurfaceCell, TargetSpec};

pub const NO_THRESHOLD: &str = "n/a (no a-priori threshold)";

/// Display rounding used in every CSV.
pub fn fmt3(x: f64) -> String {
    let s = format!("{x:.3}");
    // avoid "-0.000"
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn fmt_threshold(t: f64) -> String {
    if t.is_infinite() {
        "sentinel".into()
    } else {
        t.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Stat(MeanStd),
    Value { value: f64 },
    Missing { missing: String },
}

impl Cell {
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Stat(ms) => format!("{}±{}", fmt3(ms.mean), fmt3(ms.std)),
            Cell::Value { value } => fmt3(*value),
            Cell::Missing { missing } => missing.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricCell {
    pub metric: MetricName,
    #[serde(flatten)]
    pub cell: Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub model: String,
    pub regime: String,
    pub set: String,
    /// Number of seeds behind each cell.
    pub n_seeds: usize,
    pub cells: Vec<MetricCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<MetricName>,
    pub rows: Vec<TableRow>,
}

pub fn parse_columns<S: AsRef<str>>(names: &[S]) -> Result<Vec<MetricName>> {
    names.iter().map(|n| n.as_ref().parse()).collect()
}

impl Table {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["model".to_string(), "regime".into(), "set".into(), "n_seeds".into()];
        header.extend(self.columns.iter().map(|c| c.name().to_string()));
        w.write_record(&header).map_err(csv_err)?;
        for row in &self.rows {
            let mut rec = vec![
                row.model.clone(),
                row.regime.clone(),
                row.set.clone(),
                row.n_seeds.to_string(),
            ];
            rec.extend(row.cells.iter().map(|c| c.cell.to_csv()));
            w.write_record(&rec).map_err(csv_err)?;
        }
        csv_string(w)
    }

    pub fn row(&self, model: &str, set: &str) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.model == model && r.set == set)
    }
}

impl TableRow {
    pub fn cell(&self, metric: MetricName) -> Option<&Cell> {
        self.cells.iter().find(|c| c.metric == metric).map(|c| &c.cell)
    }
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Invariant(format!("csv buffer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Invariant(format!("csv is not utf-8: {e}")))
}

/// One row per model per evaluation set, models in the given order and
/// sets as test, slice1, ... .
pub fn render_table(aggregates: &[SeedAggregate], columns: &[MetricName]) -> Result<Table> {
    if aggregates.is_empty() {
        return Err(Error::input("no aggregates to tabulate"));
    }
    let mut rows = Vec::new();
    for agg in aggregates {
        for set in &agg.sets {
            let cells = columns
                .iter()
                .map(|&metric| MetricCell {
                    metric,
                    cell: match set.metrics.get(&metric) {
                        Some(ms) => Cell::Stat(*ms),
                        None => Cell::Missing {
                            missing: NO_THRESHOLD.into(),
                        },
                    },
                })
                .collect();
            rows.push(TableRow {
                model: agg.kind.name().into(),
                regime: agg.regime.name().into(),
                set: set.set.clone(),
                n_seeds: agg.seeds.len(),
                cells,
            });
        }
    }
    Ok(Table {
        columns: columns.to_vec(),
        rows,
    })
}

/// Single-run table for externally scored files.
pub fn render_evaluation(reports: &[EvaluationReport], source: &str, columns: &[MetricName]) -> Table {
    let rows = reports
        .iter()
        .map(|rep| TableRow {
            model: source.into(),
            regime: "external".into(),
            set: rep.set.clone(),
            n_seeds: 1,
            cells: columns
                .iter()
                .map(|&metric| MetricCell {
                    metric,
                    cell: match rep.value(metric) {
                        Some(value) => Cell::Value { value },
                        None => Cell::Missing {
                            missing: NO_THRESHOLD.into(),
                        },
                    },
                })
                .collect(),
        })
        .collect();
    Table {
        columns: columns.to_vec(),
        rows,
    }
}

/// Target zone in (v, 1 - s) coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zone {
    pub v_min: f64,
    pub v_max: f64,
    pub one_minus_s_min: f64,
    pub one_minus_s_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub v: f64,
    pub one_minus_s: f64,
    #[serde(serialize_with = "crate::serde_threshold::serialize")]
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveExport {
    pub model: String,
    pub seed: Option<u64>,
    pub set: String,
    pub case: CaucCase,
    pub cauc: f64,
    pub zone: Zone,
    pub points: Vec<CurvePoint>,
}

pub fn export_curve(curve: &OperatingCurve, targets: &TargetSpec) -> (Vec<CurvePoint>, Zone, CaucCase, f64) {
    let points = curve
        .points()
        .iter()
        .map(|p| CurvePoint {
            v: p.v,
            one_minus_s: 1.0 - p.s,
            threshold: p.threshold,
        })
        .collect();
    let zone = Zone {
        v_min: targets.v_target,
        v_max: 1.0,
        one_minus_s_min: 1.0 - targets.s_target,
        one_minus_s_max: 1.0,
    };
    let c = cauc(curve, targets);
    (points, zone, c.case, c.value)
}

pub fn curve_export(
    model: &str,
    seed: Option<u64>,
    set: &str,
    curve: &OperatingCurve,
    targets: &TargetSpec,
) -> CurveExport {
    let (points, zone, case, value) = export_curve(curve, targets);
    CurveExport {
        model: model.into(),
        seed,
        set: set.into(),
        case,
        cauc: value,
        zone,
        points,
    }
}

fn case_name(c: CaucCase) -> &'static str {
    match c {
        CaucCase::TargetReached => "target_reached",
        CaucCase::Intersects => "intersects",
        CaucCase::Gap => "gap",
    }
}

pub fn curves_to_csv(curves: &[CurveExport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["model", "seed", "set", "case", "cauc", "v", "one_minus_s", "threshold"])
        .map_err(csv_err)?;
    for c in curves {
        let seed = c.seed.map(|s| s.to_string()).unwrap_or_default();
        for p in &c.points {
            w.write_record([
                c.model.as_str(),
                &seed,
                &c.set,
                case_name(c.case),
                &fmt3(c.cauc),
                &fmt3(p.v),
                &fmt3(p.one_minus_s),
                &fmt_threshold(p.threshold),
            ])
            .map_err(csv_err)?;
        }
    }
    csv_string(w)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelinePoint {
    pub model: String,
    pub set: String,
    pub n_seeds: usize,
    pub slip: MeanStd,
    pub volume_reduction: MeanStd,
}

/// Slip and volume reduction on test, slice1..slice5 for each model.
pub fn export_timeline(aggregates: &[SeedAggregate]) -> Result<Vec<TimelinePoint>> {
    let mut out = Vec::new();
    for agg in aggregates {
        for set in &agg.sets {
            let get = |m: MetricName| {
                set.metrics
                    .get(&m)
                    .copied()
                    .ok_or_else(|| Error::input(format!("{} on {} has no threshold metrics", agg.kind, set.set)))
            };
            out.push(TimelinePoint {
                model: agg.kind.name().into(),
                set: set.set.clone(),
                n_seeds: agg.seeds.len(),
                slip: get(MetricName::Slip)?,
                volume_reduction: get(MetricName::VolumeReduction)?,
            });
        }
    }
    Ok(out)
}

pub fn timeline_to_csv(points: &[TimelinePoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["model", "set", "n_seeds", "slip", "volume_reduction"])
        .map_err(csv_err)?;
    for p in points {
        w.write_record([
            p.model.clone(),
            p.set.clone(),
            p.n_seeds.to_string(),
            Cell::Stat(p.slip).to_csv(),
            Cell::Stat(p.volume_reduction).to_csv(),
        ])
        .map_err(csv_err)?;
    }
    csv_string(w)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceExport {
    pub prevalence: f64,
    pub resolution: usize,
    pub targets: TargetSpec,
    pub cells: Vec<SurfaceCell>,
}

pub fn export_surface(prevalence: f64, resolution: usize, targets: &TargetSpec) -> Result<SurfaceExport> {
    Ok(SurfaceExport {
        prevalence,
        resolution,
        targets: *targets,
        cells: metric_surface(prevalence, resolution, targets)?,
    })
}

impl SurfaceExport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["s", "v", "accuracy", "f1", "cv"]).map_err(csv_err)?;
        for c in &self.cells {
            w.write_record([fmt3(c.s), fmt3(c.v), fmt3(c.accuracy), fmt3(c.f1), fmt3(c.cv)])
                .map_err(csv_err)?;
        }
        csv_string(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub model: String,
    pub regime: String,
    pub n_seeds: usize,
    pub verdict: Verdict,
    pub pass_count: usize,
    pub deployable_count: usize,
    pub mean_test_cv: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct TableFile<'a> {
    run_id: &'a str,
    targets: TargetSpec,
    models: &'a [ModelSummary],
    table: &'a Table,
}

/// Everything `experiment` writes for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportBundle {
    pub run_id: String,
    pub targets: TargetSpec,
    pub models: Vec<ModelSummary>,
    pub table: Table,
    pub curves: Vec<CurveExport>,
    pub timeline: Vec<TimelinePoint>,
    pub surface: SurfaceExport,
}

pub const SURFACE_RESOLUTION: usize = 21;

impl ReportBundle {
    /// `prevalence` sets the analytic surface; curves are the test-set
    /// curves of every seed.
    pub fn build(cfg: &ExperimentConfig, aggregates: &[SeedAggregate], prevalence: f64) -> Result<Self> {
        let models = aggregates
            .iter()
            .map(|a| ModelSummary {
                model: a.kind.name().into(),
                regime: a.regime.name().into(),
                n_seeds: a.seeds.len(),
                verdict: a.verdict(),
                pass_count: a.pass_count,
                deployable_count: a.deployable_count,
                mean_test_cv: a.stat(TEST_SET, MetricName::Cv).map(|m| m.mean),
            })
            .collect();
        let curves = aggregates
            .iter()
            .flat_map(|a| {
                a.runs
                    .iter()
                    .map(move |r| curve_export(a.kind.name(), Some(r.seed), TEST_SET, &r.test_curve, &cfg.targets))
            })
            .collect();
        Ok(Self {
            run_id: cfg.run_id.clone(),
            targets: cfg.targets,
            models,
            table: render_table(aggregates, &MetricName::ALL)?,
            curves,
            timeline: export_timeline(aggregates)?,
            surface: export_surface(prevalence, SURFACE_RESOLUTION, &cfg.targets)?,
        })
    }

    pub fn table_json(&self) -> Result<String> {
        to_json(&TableFile {
            run_id: &self.run_id,
            targets: self.targets,
            models: &self.models,
            table: &self.table,
        })
    }

    /// Writes the bundle under `out_dir/<run-id>/` and returns that path.
    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let dir = out_dir.join(&self.run_id);
        fs::create_dir_all(&dir)?;
        write_pair(&dir, "table", &self.table.to_csv()?, &self.table_json()?)?;
        write_pair(&dir, "curve", &curves_to_csv(&self.curves)?, &to_json(&self.curves)?)?;
        write_pair(
            &dir,
            "timeline",
            &timeline_to_csv(&self.timeline)?,
            &to_json(&self.timeline)?,
        )?;
        write_pair(&dir, "surface", &self.surface.to_csv()?, &to_json(&self.surface)?)?;
        Ok(dir)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`.
pub fn write_pair(dir: &Path, stem: &str, csv: &str, json: &str) -> Result<()> {
    fs::write(dir.join(format!("{stem}.csv")), csv)?;
    fs::write(dir.join(format!("{stem}.json")), json)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftPoint {
    pub row_index: usize,
    pub timestamp: i64,
    pub label: u8,
    /// `"first"` or `"second"` chronological half.
    pub half: &'static str,
    pub pc1: f64,
    pub pc2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftExport {
    pub n_rows: usize,
    pub explained_variance: [f64; 2],
    pub total_variance: f64,
    /// Distance between the first-half and second-half centroids.
    pub centroid_shift: f64,
    pub points: Vec<DriftPoint>,
}

/// Standardized two-component PCA of every row, tagged by chronological
/// half.
pub fn export_drift(ds: &Dataset) -> Result<DriftExport> {
    let (mut m, _) = one_hot_fit_transform(ds)?;
    m.features = Standardizer::fit(&m.features)?.transform(&m.features)?;
    let pca = pca2d(&m)?;
    let half = ds.len() / 2;
    let points = pca
        .points
        .iter()
        .map(|p| DriftPoint {
            row_index: p.row_index,
            timestamp: ds.rows()[p.row_index].timestamp,
            label: p.label,
            half: if p.row_index < half { "first" } else { "second" },
            pc1: p.pc1,
            pc2: p.pc2,
        })
        .collect();
    Ok(DriftExport {
        n_rows: ds.len(),
        explained_variance: pca.explained_variance,
        total_variance: pca.total_variance,
        centroid_shift: centroid_shift(&pca.points),
        points,
    })
}

impl DriftExport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["row_index", "timestamp", "label", "half", "pc1", "pc2"])
            .map_err(csv_err)?;
        for p in &self.points {
            w.write_record([
                p.row_index.to_string(),
                p.timestamp.to_string(),
                p.label.to_string(),
                p.half.to_string(),
                fmt3(p.pc1),
                fmt3(p.pc2),
            ])
            .map_err(csv_err)?;
        }
        csv_string(w)
    }
}
