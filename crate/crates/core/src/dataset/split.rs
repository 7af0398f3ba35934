use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::seed::rng_for;

pub const N_SLICES: usize = 5;

/// Row indices (into the chronologically sorted dataset) for each stage of
/// the evaluation protocol.
///
/// The first `floor(n/2)` rows form the modeling half: `floor(0.8 * half)`
/// rows go to hyper-parameter search and the rest to the test set, drawn
/// stratified at random. The second half is cut into five contiguous
/// slices; leftover rows go to the earliest slices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub hyperparameter: Vec<usize>,
    pub test: Vec<usize>,
    pub slices: Vec<Vec<usize>>,
}

impl SplitPlan {
    pub fn total(&self) -> usize {
        self.hyperparameter.len() + self.test.len() + self.slices.iter().map(Vec::len).sum::<usize>()
    }
}

/// Contiguous chronological cuts of `start..end` into `k` parts, remainder
/// to the earliest parts.
pub(crate) fn contiguous_slices(start: usize, end: usize, k: usize) -> Vec<Vec<usize>> {
    let len = end - start;
    let (base, rem) = (len / k, len % k);
    let mut out = Vec::with_capacity(k);
    let mut at = start;
    for i in 0..k {
        let size = base + usize::from(i < rem);
        out.push((at..at + size).collect());
        at += size;
    }
    out
}

pub fn chrono_split(ds: &Dataset, seed: u64) -> Result<SplitPlan> {
    let n = ds.len();
    let half = n / 2;
    if n - half < N_SLICES {
        return Err(Error::input(format!(
            "{n} rows cannot fill {N_SLICES} evaluation slices"
        )));
    }
    // 80/20 of the first half, nearest integer
    let hyper_size = (half * 4 + 2) / 5;
    let test_size = half - hyper_size;

    let (mut pos, mut neg): (Vec<usize>, Vec<usize>) = (0..half).partition(|&i| ds.rows()[i].label == 1);
    if pos.len() < 2 || neg.len() < 2 || test_size < 2 {
        return Err(Error::input(format!(
            "stratified split infeasible: first half has {} defects and {} false calls",
            pos.len(),
            neg.len()
        )));
    }
    // nearest-integer share of the test set, leaving each class on both sides
    let test_pos = ((2 * test_size * pos.len() + half) / (2 * half))
        .clamp(1, pos.len() - 1)
        .min(test_size - 1);
    let test_neg = test_size - test_pos;
    if test_neg >= neg.len() {
        return Err(Error::input("stratified split infeasible: too few false calls"));
    }

    let mut rng = rng_for(seed, "split", 0);
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut test: Vec<usize> = pos[..test_pos].iter().chain(&neg[..test_neg]).copied().collect();
    let mut hyperparameter: Vec<usize> = pos[test_pos..].iter().chain(&neg[test_neg..]).copied().collect();
    test.sort_unstable();
    hyperparameter.sort_unstable();

    Ok(SplitPlan {
        hyperparameter,
        test,
        slices: contiguous_slices(half, n, N_SLICES),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Stratified k-fold over `labels`. Members of each class are shuffled and
/// dealt round-robin, so per-fold class counts differ by at most one.
pub fn stratified_kfold(labels: &[u8], k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::input(format!("k-fold needs k >= 2, got {k}")));
    }
    let mut rng = rng_for(seed, "kfold", 0);
    let mut fold_of = vec![0usize; labels.len()];
    let mut dealt = 0usize;
    for class in [0u8, 1] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(Error::input(format!(
                "class {class} has {} members, fewer than {k} folds",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for m in members {
            fold_of[m] = dealt % k;
            dealt += 1;
        }
    }
    if dealt != labels.len() {
        return Err(Error::input("labels must be 0 or 1"));
    }
    Ok((0..k)
        .map(|f| {
            let (validation, train) = (0..labels.len()).partition(|&i| fold_of[i] == f);
            Fold { train, validation }
        })
        .collect())
}
