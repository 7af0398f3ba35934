use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, FeatureSubsample, TrainingView, TreeParams};
use crate::dataset::FeatureMatrix;
use crate::seed::rng_for;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub feature_subsample: FeatureSubsample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    trees: Vec<DecisionTree>,
}

/// Bootstrap of all rows.
fn plain_bag(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// Equal-size bootstraps of each class, sized by the minority class.
fn balanced_bag(pos: &[usize], neg: &[usize], rng: &mut impl Rng) -> Vec<usize> {
    let m = pos.len().min(neg.len());
    let mut bag: Vec<usize> = (0..m).map(|_| pos[rng.random_range(0..pos.len())]).collect();
    bag.extend((0..m).map(|_| neg[rng.random_range(0..neg.len())]));
    bag
}

impl Forest {
    /// Trees are seeded independently by index, so the result does not
    /// depend on how the work is scheduled.
    pub(crate) fn fit(x: &FeatureMatrix, labels: &[u8], params: &ForestParams, balanced: bool, seed: u64) -> Self {
        let tree_params = TreeParams {
            max_depth: params.max_depth,
            min_leaf: params.min_leaf,
            features_per_split: params.feature_subsample.count(x.n_cols()),
        };
        let view = TrainingView::new(x, labels);
        let (pos, neg): (Vec<usize>, Vec<usize>) = (0..labels.len()).partition(|&i| labels[i] == 1);
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = rng_for(seed, "tree", t as u64);
                let bag = if balanced {
                    let bag = balanced_bag(&pos, &neg, &mut rng);
                    debug_assert_eq!(
                        bag.iter().filter(|&&i| labels[i] == 1).count() * 2,
                        bag.len(),
                        "balanced bag must hold equal class counts"
                    );
                    bag
                } else {
                    plain_bag(labels.len(), &mut rng)
                };
                DecisionTree::fit(&view, &bag, tree_params, &mut rng)
            })
            .collect();
        Self { trees }
    }

    /// Fraction of trees voting "defect".
    pub fn score_row(&self, row: &[f64]) -> f64 {
        let votes: usize = self.trees.iter().map(|t| usize::from(t.predict(row))).sum();
        votes as f64 / self.trees.len() as f64
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }
}
