use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use super::{Column, ColumnKind, Dataset, FeatureValue, Record};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    /// Empty numeric cells are an ingestion error.
    #[default]
    Reject,
    /// Empty numeric cells are kept as [`FeatureValue::Missing`] and
    /// replaced by the training median when encoding.
    ImputeMedian,
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub timestamp_column: String,
    pub label_column: String,
    /// Label literal that marks a defect. When unset, labels must be `0`/`1`.
    pub positive_label: Option<String>,
    pub kind_overrides: HashMap<String, ColumnKind>,
    pub missing: MissingPolicy,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            timestamp_column: "timestamp".into(),
            label_column: "label".into(),
            positive_label: None,
            kind_overrides: HashMap::new(),
            missing: MissingPolicy::Reject,
        }
    }
}

/// Parses an integer epoch or an ISO-8601 date/time (converted to epoch
/// seconds).
pub(crate) fn parse_timestamp(raw: &str) -> Option<i64> {
    let raw = raw.trim();
    if let Ok(t) = raw.parse::<i64>() {
        return Some(t);
    }
    if let Ok(t) = DateTime::parse_from_rfc3339(raw) {
        return Some(t.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(t.and_utc().timestamp());
        }
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|t| t.and_utc().timestamp())
}

pub(crate) fn find_column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::ingestion(path, 1, format!("missing column {name:?}")))
}

pub fn load_csv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::ingestion(path, 1, e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::ingestion(path, 1, e.to_string()))?
        .clone();
    let ts_idx = find_column(&headers, &opts.timestamp_column, path)?;
    let label_idx = find_column(&headers, &opts.label_column, path)?;
    let feature_idx: Vec<usize> = (0..headers.len()).filter(|&i| i != ts_idx && i != label_idx).collect();

    let mut raw_rows = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::ingestion(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        raw_rows.push((line, record));
    }
    if raw_rows.is_empty() {
        return Err(Error::ingestion(path, 2, "no data rows"));
    }

    let kinds: Vec<ColumnKind> = feature_idx
        .iter()
        .map(|&i| {
            let name = headers[i].trim();
            opts.kind_overrides.get(name).copied().unwrap_or_else(|| {
                let numeric = raw_rows.iter().all(|(_, r)| {
                    let cell = r[i].trim();
                    cell.is_empty() || cell.parse::<f64>().is_ok()
                });
                if numeric {
                    ColumnKind::Numeric
                } else {
                    ColumnKind::Categorical
                }
            })
        })
        .collect();

    let label_of = label_mapper(&raw_rows, label_idx, opts, path)?;

    let mut rows = Vec::with_capacity(raw_rows.len());
    for (line, record) in &raw_rows {
        let line = *line;
        let timestamp = parse_timestamp(&record[ts_idx])
            .ok_or_else(|| Error::ingestion(path, line, format!("unparseable timestamp {:?}", &record[ts_idx])))?;
        let mut features = Vec::with_capacity(feature_idx.len());
        for (&i, &kind) in feature_idx.iter().zip(&kinds) {
            let cell = record[i].trim();
            let value = match kind {
                ColumnKind::Categorical => FeatureValue::Categorical(cell.to_string()),
                ColumnKind::Numeric if cell.is_empty() => match opts.missing {
                    MissingPolicy::Reject => {
                        return Err(Error::ingestion(
                            path,
                            line,
                            format!("missing value in numeric column {:?}", &headers[i]),
                        ))
                    }
                    MissingPolicy::ImputeMedian => FeatureValue::Missing,
                },
                ColumnKind::Numeric => match cell.parse::<f64>() {
                    Ok(x) if x.is_finite() => FeatureValue::Numeric(x),
                    _ => {
                        return Err(Error::ingestion(
                            path,
                            line,
                            format!("non-numeric value {cell:?} in column {:?}", &headers[i]),
                        ))
                    }
                },
            };
            features.push(value);
        }
        rows.push(Record {
            timestamp,
            features,
            label: label_of(&record[label_idx], line)?,
        });
    }

    let columns = feature_idx
        .iter()
        .zip(kinds)
        .map(|(&i, kind)| Column {
            name: headers[i].trim().to_string(),
            kind,
        })
        .collect();
    Dataset::new(&opts.timestamp_column, &opts.label_column, columns, rows)
}

type LabelFn<'a> = Box<dyn Fn(&str, u64) -> Result<u8> + 'a>;

fn label_mapper<'a>(
    raw_rows: &[(u64, csv::StringRecord)],
    label_idx: usize,
    opts: &'a LoadOptions,
    path: &'a Path,
) -> Result<LabelFn<'a>> {
    match &opts.positive_label {
        None => Ok(Box::new(move |cell: &str, line| match cell.trim() {
            "0" => Ok(0),
            "1" => Ok(1),
            other => Err(Error::ingestion(
                path,
                line,
                format!("label {other:?} is not 0 or 1 (set a positive label literal to map text labels)"),
            )),
        })),
        Some(positive) => {
            let mut seen: Vec<&str> = Vec::new();
            for (line, r) in raw_rows {
                let cell = r[label_idx].trim();
                if !seen.contains(&cell) {
                    if seen.len() == 2 {
                        return Err(Error::ingestion(
                            path,
                            *line,
                            format!("label column is not binary: {:?}, {:?} and {cell:?}", seen[0], seen[1]),
                        ));
                    }
                    seen.push(cell);
                }
            }
            let positive = positive.trim();
            Ok(Box::new(move |cell: &str, _| Ok(u8::from(cell.trim() == positive))))
        }
    }
}

fn format_value(v: &FeatureValue) -> String {
    match v {
        FeatureValue::Numeric(x) => format!("{x}"),
        FeatureValue::Categorical(s) => s.clone(),
        FeatureValue::Missing => String::new(),
    }
}

/// Writes a dataset in the layout [`load_csv`] reads: timestamp column,
/// feature columns, label column (`0`/`1`). Floats use their shortest
/// round-trip representation.
pub fn write_csv(ds: &Dataset, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![ds.timestamp_column().to_string()];
    header.extend(ds.columns().iter().map(|c| c.name.clone()));
    header.push(ds.label_column().to_string());
    w.write_record(&header).map_err(csv_err)?;
    for row in ds.rows() {
        let mut rec = vec![row.timestamp.to_string()];
        rec.extend(row.features.iter().map(format_value));
        rec.push(row.label.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Invariant(format!("csv writer: {other:?}")),
    }
}
