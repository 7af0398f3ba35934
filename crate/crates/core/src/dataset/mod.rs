//! Timestamped tabular inspection data.
//!
//! A [`Dataset`] holds one row per inspected board with a timestamp, mixed
//! numeric/categorical features and a binary label (`1` defect, `0` false
//! call). Rows are always kept in chronological order.

pub(crate) mod csv_io;
mod encode;
mod pca;
pub(crate) mod split;
mod synthetic;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{load_csv, write_csv, LoadOptions, MissingPolicy};
pub use encode::{one_hot_fit_transform, EncodedMatrix, FeatureMatrix, OneHotEncoder, Standardizer};
pub use pca::{centroid_shift, pca2d, Pca2d, PcaPoint};
pub use split::{chrono_split, stratified_kfold, Fold, SplitPlan, N_SLICES};
pub use synthetic::{generate_synthetic, SyntheticConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeatureValue {
    Numeric(f64),
    Categorical(String),
    /// Numeric cell left empty; imputed at encoding time.
    Missing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub timestamp: i64,
    pub features: Vec<FeatureValue>,
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    timestamp_column: String,
    label_column: String,
    columns: Vec<Column>,
    rows: Vec<Record>,
}

impl Dataset {
    /// Validates the rows against the schema and sorts them by timestamp
    /// (stable, so equal timestamps keep their input order).
    pub fn new(
        timestamp_column: impl Into<String>,
        label_column: impl Into<String>,
        columns: Vec<Column>,
        mut rows: Vec<Record>,
    ) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.features.len() != columns.len() {
                return Err(Error::input(format!(
                    "row {i} has {} features, schema has {}",
                    row.features.len(),
                    columns.len()
                )));
            }
            if row.label > 1 {
                return Err(Error::input(format!("row {i} has label {}", row.label)));
            }
            for (value, col) in row.features.iter().zip(&columns) {
                let ok = matches!(
                    (value, col.kind),
                    (FeatureValue::Numeric(_) | FeatureValue::Missing, ColumnKind::Numeric)
                        | (FeatureValue::Categorical(_), ColumnKind::Categorical)
                );
                if !ok {
                    return Err(Error::input(format!(
                        "row {i}: value {value:?} does not fit {:?} column {:?}",
                        col.kind, col.name
                    )));
                }
            }
        }
        rows.sort_by_key(|r| r.timestamp);
        Ok(Self {
            timestamp_column: timestamp_column.into(),
            label_column: label_column.into(),
            columns,
            rows,
        })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Record] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn timestamp_column(&self) -> &str {
        &self.timestamp_column
    }

    pub fn label_column(&self) -> &str {
        &self.label_column
    }

    pub fn labels(&self) -> Vec<u8> {
        self.rows.iter().map(|r| r.label).collect()
    }

    pub fn positives(&self) -> usize {
        self.rows.iter().filter(|r| r.label == 1).count()
    }

    pub fn prevalence(&self) -> f64 {
        self.positives() as f64 / self.len() as f64
    }
}
