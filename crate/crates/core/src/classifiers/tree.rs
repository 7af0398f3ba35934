//! CART classification tree with Gini impurity.
//!
//! Numeric splits sit at midpoints between consecutive distinct values and
//! send `x <= threshold` left. Among equally good splits the lowest feature
//! index wins, then the lowest threshold.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSubsample {
    Sqrt,
    Log2,
    All,
}

impl FeatureSubsample {
    pub const ALL: [FeatureSubsample; 3] = [Self::Sqrt, Self::Log2, Self::All];

    pub fn count(self, n_features: usize) -> usize {
        let n = n_features as f64;
        let k = match self {
            Self::Sqrt => n.sqrt().floor() as usize,
            Self::Log2 => n.log2().floor() as usize,
            Self::All => n_features,
        };
        k.clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
    pub features_per_split: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        vote: u8,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

fn gini_weighted(pos: usize, total: usize) -> f64 {
    // total * gini = total * (1 - p^2 - q^2) = 2 * pos * neg / total
    if total == 0 {
        return 0.0;
    }
    let neg = total - pos;
    2.0 * pos as f64 * neg as f64 / total as f64
}

/// Training data shared by every tree of a forest: the features column by
/// column and, for each column, the row indices in ascending value order.
pub(crate) struct TrainingView<'a> {
    columns: Vec<Vec<f64>>,
    order: Vec<Vec<u32>>,
    labels: &'a [u8],
}

impl<'a> TrainingView<'a> {
    pub(crate) fn new(x: &FeatureMatrix, labels: &'a [u8]) -> Self {
        let columns = x.columns();
        let order = columns
            .iter()
            .map(|col| {
                let mut idx: Vec<u32> = (0..col.len() as u32).collect();
                idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
                idx
            })
            .collect();
        Self { columns, order, labels }
    }

    pub(crate) fn n_features(&self) -> usize {
        self.columns.len()
    }
}

/// Growth state for one tree. A bag with repeats is held as per-row
/// weights; every node owns the same index range in each per-feature
/// sorted list, so split search is linear in the node size.
struct Grower<'v, 'a, R> {
    view: &'v TrainingView<'a>,
    weights: Vec<u32>,
    sorted: Vec<Vec<u32>>,
    goes_left: Vec<bool>,
    buf: Vec<u32>,
    params: TreeParams,
    rng: &'v mut R,
    nodes: Vec<Node>,
}

impl<R: Rng> Grower<'_, '_, R> {
    fn grow(&mut self, lo: usize, hi: usize, depth: usize) -> usize {
        let id = self.nodes.len();
        let labels = self.view.labels;
        let (mut n, mut pos) = (0usize, 0usize);
        for &r in &self.sorted[0][lo..hi] {
            let w = self.weights[r as usize] as usize;
            n += w;
            pos += w * usize::from(labels[r as usize]);
        }
        self.nodes.push(Node::Leaf {
            vote: u8::from(2 * pos >= n),
        });
        let params = self.params;
        if pos == 0 || pos == n || depth >= params.max_depth || n < 2 * params.min_leaf {
            return id;
        }

        let parent = gini_weighted(pos, n);
        let mut features: Vec<usize> = sample(self.rng, self.view.n_features(), params.features_per_split).into_vec();
        features.sort_unstable();

        let mut best: Option<(f64, usize, f64, usize)> = None;
        for &f in &features {
            let col = &self.view.columns[f];
            let seg = &self.sorted[f][lo..hi];
            let (mut left_n, mut left_pos) = (0usize, 0usize);
            for k in 0..seg.len() - 1 {
                let r = seg[k] as usize;
                let w = self.weights[r] as usize;
                left_n += w;
                left_pos += w * usize::from(labels[r]);
                let (a, b) = (col[r], col[seg[k + 1] as usize]);
                if a == b {
                    continue;
                }
                if left_n < params.min_leaf || n - left_n < params.min_leaf {
                    continue;
                }
                let impurity = gini_weighted(left_pos, left_n) + gini_weighted(pos - left_pos, n - left_n);
                if best.is_none_or(|(i, ..)| impurity < i) {
                    best = Some((impurity, f, 0.5 * (a + b), k + 1));
                }
            }
        }

        let Some((impurity, feature, threshold, n_left)) = best else {
            return id;
        };
        if impurity >= parent - 1e-12 {
            return id;
        }
        let col = &self.view.columns[feature];
        for &r in &self.sorted[feature][lo..hi] {
            self.goes_left[r as usize] = col[r as usize] <= threshold;
        }
        for f in 0..self.sorted.len() {
            let seg = &mut self.sorted[f][lo..hi];
            self.buf.clear();
            let mut at = 0;
            for i in 0..seg.len() {
                let r = seg[i];
                if self.goes_left[r as usize] {
                    seg[at] = r;
                    at += 1;
                } else {
                    self.buf.push(r);
                }
            }
            seg[at..].copy_from_slice(&self.buf);
        }
        let mid = lo + n_left;
        let left = self.grow(lo, mid, depth + 1);
        let right = self.grow(mid, hi, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

impl DecisionTree {
    /// Fits on the bag `samples` (row indices, repeats allowed).
    pub(crate) fn fit(view: &TrainingView<'_>, samples: &[usize], params: TreeParams, rng: &mut impl Rng) -> Self {
        let n_rows = view.labels.len();
        let mut weights = vec![0u32; n_rows];
        for &i in samples {
            weights[i] += 1;
        }
        let sorted: Vec<Vec<u32>> = view
            .order
            .iter()
            .map(|o| o.iter().copied().filter(|&r| weights[r as usize] > 0).collect())
            .collect();
        let distinct = sorted.first().map_or(0, Vec::len);
        let mut grower = Grower {
            view,
            weights,
            sorted,
            goes_left: vec![false; n_rows],
            buf: Vec::with_capacity(distinct),
            params,
            rng,
            nodes: Vec::new(),
        };
        if distinct > 0 {
            grower.grow(0, distinct, 0);
        } else {
            grower.nodes.push(Node::Leaf { vote: 0 });
        }
        Self { nodes: grower.nodes }
    }

    pub fn predict(&self, row: &[f64]) -> u8 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { vote } => return vote,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fit(rows: &[Vec<f64>], labels: &[u8], params: TreeParams) -> DecisionTree {
        let x = FeatureMatrix::from_rows(rows).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let view = TrainingView::new(&x, labels);
        DecisionTree::fit(&view, &(0..rows.len()).collect::<Vec<_>>(), params, &mut rng)
    }

    const FULL: TreeParams = TreeParams {
        max_depth: 30,
        min_leaf: 1,
        features_per_split: 2,
    };

    #[test]
    fn splits_at_midpoint() {
        let rows = vec![vec![0.0, 5.0], vec![1.0, 5.0], vec![3.0, 5.0], vec![4.0, 5.0]];
        let tree = fit(&rows, &[0, 0, 1, 1], FULL);
        assert_eq!(tree.depth(), 1);
        assert_eq!(
            tree.nodes[0],
            Node::Split {
                feature: 0,
                threshold: 2.0,
                left: 1,
                right: 2
            }
        );
        assert_eq!(tree.predict(&[1.9, 0.0]), 0);
        assert_eq!(tree.predict(&[2.1, 0.0]), 1);
    }

    #[test]
    fn ties_go_to_lowest_feature_index() {
        // both columns separate the classes equally well
        let rows = vec![vec![0.0, 10.0], vec![1.0, 11.0], vec![2.0, 12.0], vec![3.0, 13.0]];
        let tree = fit(&rows, &[0, 0, 1, 1], FULL);
        assert!(matches!(tree.nodes[0], Node::Split { feature: 0, .. }));
    }

    #[test]
    fn memorizes_distinct_points_when_unrestricted() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, ((i * 7) % 5) as f64]).collect();
        let labels: Vec<u8> = (0..20).map(|i| u8::from(i % 3 == 0)).collect();
        let tree = fit(&rows, &labels, FULL);
        for (r, &l) in rows.iter().zip(&labels) {
            assert_eq!(tree.predict(r), l);
        }
    }

    #[test]
    fn depth_and_leaf_limits() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, 0.0]).collect();
        let labels: Vec<u8> = (0..20).map(|i| (i % 2) as u8).collect();
        let shallow = fit(&rows, &labels, TreeParams { max_depth: 2, ..FULL });
        assert!(shallow.depth() <= 2);
        let coarse = fit(&rows, &labels, TreeParams { min_leaf: 10, ..FULL });
        assert!(coarse.depth() <= 1);
    }

    #[test]
    fn subsample_counts() {
        assert_eq!(FeatureSubsample::Sqrt.count(10), 3);
        assert_eq!(FeatureSubsample::Log2.count(10), 3);
        assert_eq!(FeatureSubsample::All.count(10), 10);
        assert_eq!(FeatureSubsample::Log2.count(1), 1);
    }
}
