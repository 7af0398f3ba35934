//! Sequential hyper-parameter search over the unit cube.
//!
//! Points are decoded into concrete hyper-parameters by
//! [`HyperParamSpace::decode`](crate::classifiers::HyperParamSpace::decode).

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    #[default]
    Random,
    /// Tree-structured Parzen estimator: candidates are drawn around the
    /// best quarter of past trials and ranked by the density ratio of
    /// "good" to "bad" trials.
    Surrogate,
}

pub trait SearchStrategy {
    fn suggest(&mut self, rng: &mut ChaCha8Rng) -> Vec<f64>;
    fn observe(&mut self, point: Vec<f64>, score: f64);
}

pub fn strategy(kind: OptimizerKind, dims: usize) -> Box<dyn SearchStrategy> {
    match kind {
        OptimizerKind::Random => Box::new(RandomSearch { dims }),
        OptimizerKind::Surrogate => Box::new(ParzenSearch {
            dims,
            history: Vec::new(),
        }),
    }
}

struct RandomSearch {
    dims: usize,
}

impl SearchStrategy for RandomSearch {
    fn suggest(&mut self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.dims).map(|_| rng.random()).collect()
    }

    fn observe(&mut self, _point: Vec<f64>, _score: f64) {}
}

const STARTUP_TRIALS: usize = 5;
const CANDIDATES: usize = 24;
const GOOD_FRACTION: f64 = 0.25;
const BANDWIDTH: f64 = 0.15;

struct ParzenSearch {
    dims: usize,
    history: Vec<(Vec<f64>, f64)>,
}

fn density(x: &[f64], centers: &[&[f64]]) -> f64 {
    let inv = 1.0 / (2.0 * BANDWIDTH * BANDWIDTH);
    let sum: f64 = centers
        .iter()
        .map(|c| {
            let d2: f64 = x.iter().zip(*c).map(|(a, b)| (a - b) * (a - b)).sum();
            (-d2 * inv).exp()
        })
        .sum();
    // one pseudo-observation of the uniform prior keeps the ratio finite
    (sum + 1.0) / (centers.len() as f64 + 1.0)
}

fn reflect(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r > 1.0 {
        2.0 - r
    } else {
        r
    }
}

impl SearchStrategy for ParzenSearch {
    fn suggest(&mut self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        if self.dims == 0 {
            return Vec::new();
        }
        if self.history.len() < STARTUP_TRIALS {
            return (0..self.dims).map(|_| rng.random()).collect();
        }
        let mut ranked: Vec<&(Vec<f64>, f64)> = self.history.iter().collect();
        // stable sort keeps earlier trials first among equal scores
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
        let n_good = ((ranked.len() as f64 * GOOD_FRACTION).ceil() as usize).max(1);
        let good: Vec<&[f64]> = ranked[..n_good].iter().map(|t| t.0.as_slice()).collect();
        let bad: Vec<&[f64]> = ranked[n_good..].iter().map(|t| t.0.as_slice()).collect();

        let noise = Normal::new(0.0, BANDWIDTH).expect("positive bandwidth");
        let mut best: Option<(f64, Vec<f64>)> = None;
        for _ in 0..CANDIDATES {
            let center = good[rng.random_range(0..good.len())];
            let cand: Vec<f64> = center.iter().map(|&c| reflect(c + noise.sample(rng))).collect();
            let ratio = density(&cand, &good) / density(&cand, &bad);
            if best.as_ref().is_none_or(|(r, _)| ratio > *r) {
                best = Some((ratio, cand));
            }
        }
        best.map(|(_, c)| c).expect("at least one candidate")
    }

    fn observe(&mut self, point: Vec<f64>, score: f64) {
        self.history.push((point, score));
    }
}
