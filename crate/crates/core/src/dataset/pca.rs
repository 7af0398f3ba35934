use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::EncodedMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcaPoint {
    pub pc1: f64,
    pub pc2: f64,
    pub row_index: usize,
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pca2d {
    pub points: Vec<PcaPoint>,
    /// Variance along each component, largest first.
    pub explained_variance: [f64; 2],
    pub components: [Vec<f64>; 2],
    pub total_variance: f64,
}

/// Projects mean-centered rows onto the two leading principal directions.
pub fn pca2d(m: &EncodedMatrix) -> Result<Pca2d> {
    let x = &m.features;
    let (n, d) = (x.n_rows(), x.n_cols());
    if d < 2 || n < 3 {
        return Err(Error::input(format!(
            "PCA needs >= 2 columns and >= 3 rows, got {d}x{n}"
        )));
    }
    let mut mean = vec![0.0; d];
    for row in x.rows() {
        for (acc, v) in mean.iter_mut().zip(row) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= n as f64);
    let centered = DMatrix::from_fn(n, d, |i, j| x.get(i, j) - mean[j]);
    let cov = (centered.transpose() * &centered) / n as f64;
    let total_variance = cov.trace();
    if total_variance <= 1e-12 {
        return Err(Error::Degenerate("all rows are identical".into()));
    }

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let direction = |k: usize| -> Vec<f64> {
        let col = eig.eigenvectors.column(order[k]);
        // sign convention: largest-magnitude entry positive
        let pivot = col
            .iter()
            .copied()
            .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        col.iter().map(|v| v * sign).collect()
    };
    let components = [direction(0), direction(1)];
    let points = (0..n)
        .map(|i| {
            let row = centered.row(i);
            let proj = |c: &[f64]| row.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
            PcaPoint {
                pc1: proj(&components[0]),
                pc2: proj(&components[1]),
                row_index: m.row_indices[i],
                label: m.labels[i],
            }
        })
        .collect();
    Ok(Pca2d {
        points,
        explained_variance: [eig.eigenvalues[order[0]].max(0.0), eig.eigenvalues[order[1]].max(0.0)],
        components,
        total_variance,
    })
}

/// Distance between the `(pc1, pc2)` centroids of the first and second
/// half of the points, in the given order.
pub fn centroid_shift(points: &[PcaPoint]) -> f64 {
    let half = points.len() / 2;
    let centroid = |ps: &[PcaPoint]| {
        let k = ps.len().max(1) as f64;
        (
            ps.iter().map(|p| p.pc1).sum::<f64>() / k,
            ps.iter().map(|p| p.pc2).sum::<f64>() / k,
        )
    };
    let (a1, a2) = centroid(&points[..half]);
    let (b1, b2) = centroid(&points[half..]);
    ((a1 - b1).powi(2) + (a2 - b2).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::FeatureMatrix;

    fn matrix(rows: &[Vec<f64>]) -> EncodedMatrix {
        let labels = vec![0; rows.len()];
        EncodedMatrix::new(FeatureMatrix::from_rows(rows).unwrap(), labels).unwrap()
    }

    #[test]
    fn two_dimensional_input_is_rotated() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let t = i as f64;
                vec![t + (t * 1.7).sin(), 0.5 * t - (t * 0.3).cos()]
            })
            .collect();
        let m = matrix(&rows);
        let p = pca2d(&m).unwrap();
        let n = rows.len() as f64;
        let var1 = p.points.iter().map(|q| q.pc1 * q.pc1).sum::<f64>() / n;
        let var2 = p.points.iter().map(|q| q.pc2 * q.pc2).sum::<f64>() / n;
        assert!((var1 + var2 - p.total_variance).abs() < 1e-8);
        assert!((var1 - p.explained_variance[0]).abs() < 1e-8);
        assert!(var1 >= var2);
        // distances to the centroid are preserved by a rotation
        let mean: Vec<f64> = (0..2).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
        for (r, q) in rows.iter().zip(&p.points) {
            let d0 = (r[0] - mean[0]).powi(2) + (r[1] - mean[1]).powi(2);
            assert!((d0 - (q.pc1 * q.pc1 + q.pc2 * q.pc2)).abs() < 1e-8);
        }
    }

    #[test]
    fn single_axis_variance_gives_flat_second_component() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 3.0, -1.0]).collect();
        let p = pca2d(&matrix(&rows)).unwrap();
        assert!(p.points.iter().all(|q| q.pc2.abs() < 1e-9));
    }

    #[test]
    fn projection_is_centered_and_orthogonal() {
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| {
                let t = i as f64;
                vec![t.sin() * 3.0, t.cos(), (t * 0.7).sin() + t * 0.1, 2.0]
            })
            .collect();
        let p = pca2d(&matrix(&rows)).unwrap();
        let n = p.points.len() as f64;
        assert!((p.points.iter().map(|q| q.pc1).sum::<f64>() / n).abs() < 1e-9);
        assert!((p.points.iter().map(|q| q.pc2).sum::<f64>() / n).abs() < 1e-9);
        let dot: f64 = p.components[0].iter().zip(&p.components[1]).map(|(a, b)| a * b).sum();
        assert!(dot.abs() <= 1e-8);
    }

    #[test]
    fn degenerate_inputs() {
        let same = vec![vec![1.0, 2.0]; 5];
        assert!(matches!(pca2d(&matrix(&same)), Err(Error::Degenerate(_))));
        assert!(pca2d(&matrix(&[vec![1.0, 2.0], vec![2.0, 1.0]])).is_err());
        assert!(pca2d(&matrix(&[vec![1.0], vec![2.0], vec![3.0]])).is_err());
    }
}
