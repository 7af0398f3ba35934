//! Synthetic inspection data with time-local clusters.
//!
//! Every cluster has a random center (scaled by `drift_strength`), a random
//! unit "defect direction" and an activity window on the normalized time
//! axis `[0, 1)`. Row `i` sits at time `(i + 0.5) / n` and is drawn from one
//! of the clusters active at that time. Defects are shifted from the
//! cluster center by `class_separation` along the cluster's defect
//! direction; every feature carries Gaussian noise of standard deviation
//! `noise`. A categorical `line` column names the generating cluster.
//!
//! Exactly `round(n_rows * prevalence)` rows are defects, placed uniformly
//! at random.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Column, ColumnKind, Dataset, FeatureValue, Record};
use crate::error::{Error, Result};
use crate::seed::rng_for;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub n_rows: usize,
    pub prevalence: f64,
    pub n_clusters: usize,
    /// `[start, end)` per cluster on the normalized time axis. Empty means
    /// every cluster is active throughout.
    pub cluster_windows: Vec<(f64, f64)>,
    pub drift_strength: f64,
    pub class_separation: f64,
    pub noise: f64,
    pub n_features: usize,
    pub seed: u64,
    pub start_timestamp: i64,
    pub interval_seconds: i64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n_rows: 10_000,
            prevalence: 0.01,
            n_clusters: 1,
            cluster_windows: Vec::new(),
            drift_strength: 0.0,
            class_separation: 3.0,
            noise: 1.0,
            n_features: 6,
            seed: 0,
            start_timestamp: 1_600_000_000,
            interval_seconds: 60,
        }
    }
}

impl SyntheticConfig {
    fn windows(&self) -> Result<Vec<(f64, f64)>> {
        if self.cluster_windows.is_empty() {
            return Ok(vec![(0.0, 1.0); self.n_clusters]);
        }
        if self.cluster_windows.len() != self.n_clusters {
            return Err(Error::input(format!(
                "{} windows for {} clusters",
                self.cluster_windows.len(),
                self.n_clusters
            )));
        }
        for &(a, b) in &self.cluster_windows {
            if !(0.0..1.0).contains(&a) || b <= a || b > 1.0 {
                return Err(Error::input(format!("window [{a}, {b}) is not inside [0, 1)")));
            }
        }
        let mut sorted = self.cluster_windows.clone();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut covered = 0.0;
        for (a, b) in sorted {
            if a > covered {
                return Err(Error::input(format!("no cluster active in [{covered}, {a})")));
            }
            covered = f64::max(covered, b);
        }
        if covered < 1.0 {
            return Err(Error::input(format!("no cluster active in [{covered}, 1)")));
        }
        Ok(self.cluster_windows.clone())
    }

    fn validate(&self) -> Result<()> {
        if self.n_rows == 0 || self.n_features == 0 || self.n_clusters == 0 {
            return Err(Error::input("n_rows, n_features and n_clusters must be positive"));
        }
        if !(self.prevalence > 0.0 && self.prevalence < 0.5) {
            return Err(Error::input(format!("prevalence {} outside (0, 0.5)", self.prevalence)));
        }
        if self.noise < 0.0 || self.drift_strength < 0.0 || self.class_separation < 0.0 {
            return Err(Error::input("noise, drift_strength and class_separation must be >= 0"));
        }
        Ok(())
    }
}

fn gaussian_vec(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

fn unit_vec(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    loop {
        let v = gaussian_vec(rng, d);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<Dataset> {
    cfg.validate()?;
    let windows = cfg.windows()?;
    let d = cfg.n_features;
    let n = cfg.n_rows;

    let mut cluster_rng = rng_for(cfg.seed, "synthetic-clusters", 0);
    let centers: Vec<Vec<f64>> = (0..cfg.n_clusters)
        .map(|_| {
            gaussian_vec(&mut cluster_rng, d)
                .into_iter()
                .map(|x| x * cfg.drift_strength)
                .collect()
        })
        .collect();
    let defect_dirs: Vec<Vec<f64>> = (0..cfg.n_clusters).map(|_| unit_vec(&mut cluster_rng, d)).collect();

    let n_pos = ((n as f64) * cfg.prevalence).round() as usize;
    let mut labels = vec![0u8; n];
    let mut label_rng = rng_for(cfg.seed, "synthetic-labels", 0);
    for i in sample(&mut label_rng, n, n_pos) {
        labels[i] = 1;
    }

    let mut rng = rng_for(cfg.seed, "synthetic-rows", 0);
    let mut rows = Vec::with_capacity(n);
    for (i, &label) in labels.iter().enumerate() {
        let t = (i as f64 + 0.5) / n as f64;
        let active: Vec<usize> = windows
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a <= t && t < b)
            .map(|(c, _)| c)
            .collect();
        let cluster = active[rng.random_range(0..active.len())];
        let shift = f64::from(label) * cfg.class_separation;
        let mut features: Vec<FeatureValue> = (0..d)
            .map(|j| {
                let z: f64 = StandardNormal.sample(&mut rng);
                FeatureValue::Numeric(centers[cluster][j] + shift * defect_dirs[cluster][j] + cfg.noise * z)
            })
            .collect();
        features.push(FeatureValue::Categorical(format!("L{cluster}")));
        rows.push(Record {
            timestamp: cfg.start_timestamp + i as i64 * cfg.interval_seconds,
            features,
            label,
        });
    }

    let mut columns: Vec<Column> = (0..d)
        .map(|j| Column {
            name: format!("f{j}"),
            kind: ColumnKind::Numeric,
        })
        .collect();
    columns.push(Column {
        name: "line".into(),
        kind: ColumnKind::Categorical,
    });
    Dataset::new("timestamp", "label", columns, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(r: &Record) -> &str {
        match r.features.last() {
            Some(FeatureValue::Categorical(s)) => s,
            _ => unreachable!(),
        }
    }

    #[test]
    fn exact_prevalence() {
        let ds = generate_synthetic(&SyntheticConfig::default()).unwrap();
        assert_eq!(ds.len(), 10_000);
        assert_eq!(ds.positives(), 100);
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = SyntheticConfig {
            n_rows: 500,
            n_clusters: 3,
            drift_strength: 2.0,
            ..SyntheticConfig::default()
        };
        assert_eq!(generate_synthetic(&cfg).unwrap(), generate_synthetic(&cfg).unwrap());
        let other = SyntheticConfig { seed: 1, ..cfg.clone() };
        assert_ne!(generate_synthetic(&cfg).unwrap(), generate_synthetic(&other).unwrap());
    }

    #[test]
    fn clusters_respect_windows() {
        let cfg = SyntheticConfig {
            n_rows: 1000,
            n_clusters: 2,
            cluster_windows: vec![(0.0, 0.5), (0.5, 1.0)],
            drift_strength: 3.0,
            ..SyntheticConfig::default()
        };
        let ds = generate_synthetic(&cfg).unwrap();
        let start = cfg.start_timestamp;
        let mid = start + 500 * cfg.interval_seconds;
        for r in ds.rows() {
            if line_of(r) == "L1" {
                assert!(r.timestamp >= mid);
            } else {
                assert!(r.timestamp < mid);
            }
        }
    }

    #[test]
    fn window_validation() {
        let gap = SyntheticConfig {
            n_clusters: 2,
            cluster_windows: vec![(0.0, 0.4), (0.5, 1.0)],
            ..SyntheticConfig::default()
        };
        assert!(generate_synthetic(&gap).is_err());
        let short = SyntheticConfig {
            n_clusters: 1,
            cluster_windows: vec![(0.0, 0.9)],
            ..SyntheticConfig::default()
        };
        assert!(generate_synthetic(&short).is_err());
        let count = SyntheticConfig {
            n_clusters: 2,
            cluster_windows: vec![(0.0, 1.0)],
            ..SyntheticConfig::default()
        };
        assert!(generate_synthetic(&count).is_err());
        let prevalence = SyntheticConfig {
            prevalence: 0.6,
            ..SyntheticConfig::default()
        };
        assert!(generate_synthetic(&prevalence).is_err());
    }

    #[test]
    fn stationary_class_ratio_is_stable_over_time() {
        let cfg = SyntheticConfig {
            n_rows: 20_000,
            prevalence: 0.05,
            ..SyntheticConfig::default()
        };
        let ds = generate_synthetic(&cfg).unwrap();
        let first = ds.rows()[..10_000].iter().filter(|r| r.label == 1).count() as f64;
        let second = ds.rows()[10_000..].iter().filter(|r| r.label == 1).count() as f64;
        // binomial sd of each half count is about 22
        assert!((first - second).abs() < 6.0 * 22.0);
    }
}
