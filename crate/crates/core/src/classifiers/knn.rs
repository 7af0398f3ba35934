use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureMatrix, Standardizer};
use crate::error::Result;

/// k-nearest-neighbour scorer on standardized features.
///
/// The score is the defect fraction among the `k` nearest training rows
/// (Euclidean). Rows tied with the k-th distance are all included, so the
/// neighbourhood can grow beyond `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    k: usize,
    scaler: Standardizer,
    train: FeatureMatrix,
    labels: Vec<u8>,
}

impl Knn {
    pub(crate) fn fit(x: &FeatureMatrix, labels: &[u8], k: usize) -> Result<Self> {
        let scaler = Standardizer::fit(x)?;
        Ok(Self {
            k,
            train: scaler.transform(x)?,
            scaler,
            labels: labels.to_vec(),
        })
    }

    pub(crate) fn score(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        let q = self.scaler.transform(x)?;
        let rows: Vec<&[f64]> = q.rows().collect();
        Ok(rows.par_iter().map(|row| self.score_row(row)).collect())
    }

    fn score_row(&self, row: &[f64]) -> f64 {
        let dist: Vec<f64> = self
            .train
            .rows()
            .map(|t| t.iter().zip(row).map(|(a, b)| (a - b) * (a - b)).sum())
            .collect();
        let mut scratch = dist.clone();
        let (_, &mut kth, _) = scratch.select_nth_unstable_by(self.k - 1, f64::total_cmp);
        let (mut n, mut pos) = (0usize, 0usize);
        for (&d, &l) in dist.iter().zip(&self.labels) {
            if d <= kth {
                n += 1;
                pos += usize::from(l);
            }
        }
        pos as f64 / n as f64
    }
}
