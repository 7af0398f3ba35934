use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{ColumnKind, Dataset, FeatureValue};
use crate::error::{Error, Result};

/// Dense row-major numeric features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
    column_names: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(n_cols: usize, data: Vec<f64>, column_names: Vec<String>) -> Result<Self> {
        if n_cols == 0 {
            return Err(Error::input("feature matrix needs at least one column"));
        }
        if !data.len().is_multiple_of(n_cols) || column_names.len() != n_cols {
            return Err(Error::input(format!(
                "{} values and {} names do not fit {n_cols} columns",
                data.len(),
                column_names.len()
            )));
        }
        Ok(Self {
            n_rows: data.len() / n_cols,
            n_cols,
            data,
            column_names,
        })
    }

    /// Unnamed columns `x0, x1, ...`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::input("ragged rows"));
        }
        let names = (0..n_cols).map(|i| format!("x{i}")).collect();
        Self::new(n_cols, rows.concat(), names)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_cols)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n_cols + col]
    }

    /// Column-major copy of the data.
    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n_cols)
            .map(|c| (0..self.n_rows).map(|r| self.get(r, c)).collect())
            .collect()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn select(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.n_cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self {
            n_rows: rows.len(),
            n_cols: self.n_cols,
            data,
            column_names: self.column_names.clone(),
        }
    }

    /// Same matrix with its columns reordered: column `j` of the result is
    /// column `order[j]` of `self`.
    pub fn permute_columns(&self, order: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for row in self.rows() {
            data.extend(order.iter().map(|&j| row[j]));
        }
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data,
            column_names: order.iter().map(|&j| self.column_names[j].clone()).collect(),
        }
    }
}

/// Encoded features with labels and the dataset rows they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedMatrix {
    pub features: FeatureMatrix,
    pub labels: Vec<u8>,
    pub row_indices: Vec<usize>,
    /// Missing numeric cells replaced by the fitted median.
    pub imputed_cells: usize,
}

impl EncodedMatrix {
    pub fn new(features: FeatureMatrix, labels: Vec<u8>) -> Result<Self> {
        if features.n_rows() != labels.len() {
            return Err(Error::input(format!(
                "{} feature rows but {} labels",
                features.n_rows(),
                labels.len()
            )));
        }
        let row_indices = (0..labels.len()).collect();
        Ok(Self {
            features,
            labels,
            row_indices,
            imputed_cells: 0,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn select(&self, rows: &[usize]) -> Self {
        Self {
            features: self.features.select(rows),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            row_indices: rows.iter().map(|&r| self.row_indices[r]).collect(),
            imputed_cells: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum EncodedColumn {
    Numeric { source: usize, median: f64 },
    Categorical { source: usize, levels: Vec<String> },
}

/// One-hot encoder fitted on a subset of a dataset's rows.
///
/// Numeric columns pass through (missing cells take the fitted median);
/// each categorical level seen at fit time gets one indicator column, and
/// levels first seen later encode as all zeros. The timestamp is dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneHotEncoder {
    columns: Vec<EncodedColumn>,
    names: Vec<String>,
}

impl OneHotEncoder {
    pub fn fit(ds: &Dataset, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::input("cannot fit an encoder on zero rows"));
        }
        let mut columns = Vec::new();
        let mut names = Vec::new();
        for (source, col) in ds.columns().iter().enumerate() {
            match col.kind {
                ColumnKind::Numeric => {
                    let mut values: Vec<f64> = rows
                        .iter()
                        .filter_map(|&r| match ds.rows()[r].features[source] {
                            FeatureValue::Numeric(x) => Some(x),
                            _ => None,
                        })
                        .collect();
                    if values.is_empty() {
                        return Err(Error::input(format!("column {:?} has no values to fit", col.name)));
                    }
                    values.sort_by(f64::total_cmp);
                    let mid = values.len() / 2;
                    let median = if values.len() % 2 == 1 {
                        values[mid]
                    } else {
                        0.5 * (values[mid - 1] + values[mid])
                    };
                    columns.push(EncodedColumn::Numeric { source, median });
                    names.push(col.name.clone());
                }
                ColumnKind::Categorical => {
                    let levels: BTreeSet<&str> = rows
                        .iter()
                        .filter_map(|&r| match &ds.rows()[r].features[source] {
                            FeatureValue::Categorical(s) => Some(s.as_str()),
                            _ => None,
                        })
                        .collect();
                    names.extend(levels.iter().map(|l| format!("{}={l}", col.name)));
                    columns.push(EncodedColumn::Categorical {
                        source,
                        levels: levels.into_iter().map(String::from).collect(),
                    });
                }
            }
        }
        if names.is_empty() {
            return Err(Error::input("dataset has no feature columns"));
        }
        Ok(Self { columns, names })
    }

    pub fn n_outputs(&self) -> usize {
        self.names.len()
    }

    pub fn output_names(&self) -> &[String] {
        &self.names
    }

    pub fn transform(&self, ds: &Dataset, rows: &[usize]) -> Result<EncodedMatrix> {
        let (features, imputed) = self.transform_features(ds, rows)?;
        Ok(EncodedMatrix {
            features,
            labels: rows.iter().map(|&r| ds.rows()[r].label).collect(),
            row_indices: rows.to_vec(),
            imputed_cells: imputed,
        })
    }

    /// Encodes features only, without reading labels. Also returns the
    /// number of imputed cells.
    pub fn transform_features(&self, ds: &Dataset, rows: &[usize]) -> Result<(FeatureMatrix, usize)> {
        let width = self.names.len();
        let mut data = Vec::with_capacity(rows.len() * width);
        let mut imputed = 0;
        for &r in rows {
            let record = ds
                .rows()
                .get(r)
                .ok_or_else(|| Error::input(format!("row {r} out of range")))?;
            for col in &self.columns {
                match col {
                    EncodedColumn::Numeric { source, median } => match &record.features[*source] {
                        FeatureValue::Numeric(x) => data.push(*x),
                        FeatureValue::Missing => {
                            imputed += 1;
                            data.push(*median);
                        }
                        FeatureValue::Categorical(_) => {
                            return Err(Error::input("categorical value in numeric column"))
                        }
                    },
                    EncodedColumn::Categorical { source, levels } => {
                        let value = match &record.features[*source] {
                            FeatureValue::Categorical(s) => Some(s.as_str()),
                            _ => None,
                        };
                        data.extend(levels.iter().map(|l| if Some(l.as_str()) == value { 1.0 } else { 0.0 }));
                    }
                }
            }
        }
        Ok((FeatureMatrix::new(width, data, self.names.clone())?, imputed))
    }
}

/// Fits the encoder on every row and encodes the whole dataset.
pub fn one_hot_fit_transform(ds: &Dataset) -> Result<(EncodedMatrix, OneHotEncoder)> {
    if ds.is_empty() {
        return Err(Error::input("empty dataset"));
    }
    let all: Vec<usize> = (0..ds.len()).collect();
    let enc = OneHotEncoder::fit(ds, &all)?;
    Ok((enc.transform(ds, &all)?, enc))
}

/// Per-column zero-mean, unit-variance scaling. Constant columns are only
/// centered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(m: &FeatureMatrix) -> Result<Self> {
        if m.n_rows() == 0 {
            return Err(Error::input("cannot standardize zero rows"));
        }
        let n = m.n_rows() as f64;
        let mut mean = vec![0.0; m.n_cols()];
        for row in m.rows() {
            for (acc, x) in mean.iter_mut().zip(row) {
                *acc += x;
            }
        }
        mean.iter_mut().for_each(|x| *x /= n);
        let mut var = vec![0.0; m.n_cols()];
        for row in m.rows() {
            for ((acc, x), mu) in var.iter_mut().zip(row).zip(&mean) {
                *acc += (x - mu) * (x - mu);
            }
        }
        let scale = var
            .into_iter()
            .map(|v| {
                let sd = (v / n).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Self { mean, scale })
    }

    pub fn transform(&self, m: &FeatureMatrix) -> Result<FeatureMatrix> {
        if m.n_cols() != self.mean.len() {
            return Err(Error::input(format!(
                "standardizer fitted on {} columns, got {}",
                self.mean.len(),
                m.n_cols()
            )));
        }
        let mut data = Vec::with_capacity(m.n_rows() * m.n_cols());
        for row in m.rows() {
            data.extend(
                row.iter()
                    .zip(self.mean.iter().zip(&self.scale))
                    .map(|(x, (mu, sd))| (x - mu) / sd),
            );
        }
        FeatureMatrix::new(m.n_cols(), data, m.column_names().to_vec())
    }
}
