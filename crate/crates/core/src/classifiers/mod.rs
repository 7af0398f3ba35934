//! Score-producing binary classifiers behind one train / score interface.
//!
//! All scores lie in `[0, 1]` and estimate how likely a board is a defect.

mod forest;
mod knn;
mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{EncodedMatrix, FeatureMatrix};
use crate::error::{Error, Result};

pub use forest::{Forest, ForestParams};
pub use knn::Knn;
pub use tree::{DecisionTree, FeatureSubsample};

/// Threshold at which the dummy model predicts its majority class.
pub const DUMMY_THRESHOLD: f64 = 0.5;

const MODEL_FORMAT: &str = "fcr-eval/model";
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Dummy,
    Knn,
    RandomForest,
    BalancedRandomForest,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [Self::Dummy, Self::Knn, Self::RandomForest, Self::BalancedRandomForest];

    pub fn name(self) -> &'static str {
        match self {
            Self::Dummy => "dummy",
            Self::Knn => "knn",
            Self::RandomForest => "random_forest",
            Self::BalancedRandomForest => "balanced_random_forest",
        }
    }

    /// Short label used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            Self::Dummy => "DC",
            Self::Knn => "kNN",
            Self::RandomForest => "RFC",
            Self::BalancedRandomForest => "BRFC",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s || k.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::input(format!("unknown classifier kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Params {
    Dummy,
    Knn { k: usize },
    RandomForest(ForestParams),
    BalancedRandomForest(ForestParams),
}

impl Params {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            Params::Dummy => ClassifierKind::Dummy,
            Params::Knn { .. } => ClassifierKind::Knn,
            Params::RandomForest(_) => ClassifierKind::RandomForest,
            Params::BalancedRandomForest(_) => ClassifierKind::BalancedRandomForest,
        }
    }

    /// Hyper-parameters as a name -> value map.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        match self {
            Params::Dummy => {}
            Params::Knn { k } => {
                m.insert("k".into(), k.to_string());
            }
            Params::RandomForest(p) | Params::BalancedRandomForest(p) => {
                m.insert("n_trees".into(), p.n_trees.to_string());
                m.insert("max_depth".into(), p.max_depth.to_string());
                m.insert("min_leaf".into(), p.min_leaf.to_string());
                let sub = match p.feature_subsample {
                    FeatureSubsample::Sqrt => "sqrt",
                    FeatureSubsample::Log2 => "log2",
                    FeatureSubsample::All => "all",
                };
                m.insert("feature_subsample".into(), sub.into());
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub params: Params,
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn kind(&self) -> ClassifierKind {
        self.params.kind()
    }
}

/// Search ranges for each classifier kind. Bounds are inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperParamSpace {
    /// Odd values only.
    pub knn_k: (usize, usize),
    pub n_trees: (usize, usize),
    pub max_depth: (usize, usize),
    pub min_leaf: (usize, usize),
    pub feature_subsample: Vec<FeatureSubsample>,
}

impl Default for HyperParamSpace {
    fn default() -> Self {
        Self {
            knn_k: (1, 51),
            n_trees: (10, 300),
            max_depth: (2, 30),
            min_leaf: (1, 20),
            feature_subsample: FeatureSubsample::ALL.to_vec(),
        }
    }
}

fn pick_int(u: f64, (lo, hi): (usize, usize)) -> usize {
    let span = hi - lo + 1;
    lo + ((u.clamp(0.0, 1.0) * span as f64) as usize).min(span - 1)
}

fn in_range(v: usize, (lo, hi): (usize, usize)) -> bool {
    (lo..=hi).contains(&v)
}

impl HyperParamSpace {
    /// Lists every malformed range.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let ranges = [
            ("knn_k", self.knn_k),
            ("n_trees", self.n_trees),
            ("max_depth", self.max_depth),
            ("min_leaf", self.min_leaf),
        ];
        for (name, (lo, hi)) in ranges {
            if lo == 0 || lo > hi {
                out.push(format!("space.{name} = [{lo}, {hi}] must satisfy 1 <= lo <= hi"));
            }
        }
        if self.knn_k.0 == self.knn_k.1 && self.knn_k.0.is_multiple_of(2) {
            out.push("space.knn_k contains no odd value".into());
        }
        if self.feature_subsample.is_empty() {
            out.push("space.feature_subsample is empty".into());
        }
        out
    }

    /// Number of coordinates [`decode`](Self::decode) consumes for `kind`.
    pub fn dims(&self, kind: ClassifierKind) -> usize {
        match kind {
            ClassifierKind::Dummy => 0,
            ClassifierKind::Knn => 1,
            ClassifierKind::RandomForest | ClassifierKind::BalancedRandomForest => 4,
        }
    }

    /// Maps a point of the unit cube to concrete hyper-parameters.
    pub fn decode(&self, kind: ClassifierKind, u: &[f64]) -> Result<Params> {
        if u.len() != self.dims(kind) {
            return Err(Error::input(format!(
                "{kind} takes {} coordinates, got {}",
                self.dims(kind),
                u.len()
            )));
        }
        let forest = || ForestParams {
            n_trees: pick_int(u[0], self.n_trees),
            max_depth: pick_int(u[1], self.max_depth),
            min_leaf: pick_int(u[2], self.min_leaf),
            feature_subsample: self.feature_subsample[pick_int(u[3], (0, self.feature_subsample.len() - 1))],
        };
        Ok(match kind {
            ClassifierKind::Dummy => Params::Dummy,
            ClassifierKind::Knn => {
                let (lo, hi) = self.knn_k;
                let odd_lo = lo | 1;
                let n_odd = (hi.saturating_sub(odd_lo)) / 2 + 1;
                Params::Knn {
                    k: odd_lo + 2 * pick_int(u[0], (0, n_odd - 1)),
                }
            }
            ClassifierKind::RandomForest => Params::RandomForest(forest()),
            ClassifierKind::BalancedRandomForest => Params::BalancedRandomForest(forest()),
        })
    }

    pub fn contains(&self, params: &Params) -> bool {
        match params {
            Params::Dummy => true,
            Params::Knn { k } => k % 2 == 1 && in_range(*k, self.knn_k),
            Params::RandomForest(p) | Params::BalancedRandomForest(p) => {
                in_range(p.n_trees, self.n_trees)
                    && in_range(p.max_depth, self.max_depth)
                    && in_range(p.min_leaf, self.min_leaf)
                    && self.feature_subsample.contains(&p.feature_subsample)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum ModelState {
    Dummy { score: f64 },
    Knn(Knn),
    Forest(Forest),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    spec: ClassifierSpec,
    state: ModelState,
    #[serde(with = "crate::serde_threshold::option")]
    decision_threshold: Option<f64>,
    n_train: usize,
    n_features: usize,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: TrainedModel,
}

/// Fits a classifier. Deterministic in `(spec, data)`.
pub fn train(spec: &ClassifierSpec, data: &EncodedMatrix) -> Result<TrainedModel> {
    let n = data.n_rows();
    if n == 0 {
        return Err(Error::input("no training rows"));
    }
    let pos = data.labels.iter().filter(|&&l| l == 1).count();
    let single_class = pos == 0 || pos == n;
    if single_class && spec.kind() != ClassifierKind::Dummy {
        return Err(Error::input(format!(
            "{} needs both classes in training data",
            spec.kind()
        )));
    }
    let x = &data.features;
    let state = match &spec.params {
        Params::Dummy => ModelState::Dummy {
            score: if 2 * pos > n { 1.0 } else { 0.0 },
        },
        Params::Knn { k } => {
            if *k == 0 || *k > n {
                return Err(Error::input(format!("k = {k} with {n} training rows")));
            }
            ModelState::Knn(Knn::fit(x, &data.labels, *k)?)
        }
        Params::RandomForest(p) | Params::BalancedRandomForest(p) => {
            if p.n_trees == 0 || p.max_depth == 0 || p.min_leaf == 0 {
                return Err(Error::input(format!("invalid forest parameters {p:?}")));
            }
            let balanced = matches!(spec.params, Params::BalancedRandomForest(_));
            ModelState::Forest(Forest::fit(x, &data.labels, p, balanced, spec.seed))
        }
    };
    Ok(TrainedModel {
        spec: *spec,
        state,
        decision_threshold: None,
        n_train: n,
        n_features: x.n_cols(),
    })
}

impl TrainedModel {
    pub fn spec(&self) -> &ClassifierSpec {
        &self.spec
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn decision_threshold(&self) -> Option<f64> {
        self.decision_threshold
    }

    pub fn set_threshold(&mut self, threshold: f64) -> Result<()> {
        if !(threshold.is_infinite() && threshold > 0.0) && !(0.0..=1.0).contains(&threshold) {
            return Err(Error::input(format!("threshold {threshold} outside [0, 1]")));
        }
        self.decision_threshold = Some(threshold);
        Ok(())
    }

    pub fn score(&self, rows: &FeatureMatrix) -> Result<Vec<f64>> {
        if rows.n_cols() != self.n_features {
            return Err(Error::input(format!(
                "model trained on {} features, got {}",
                self.n_features,
                rows.n_cols()
            )));
        }
        match &self.state {
            ModelState::Dummy { score } => Ok(vec![*score; rows.n_rows()]),
            ModelState::Knn(m) => m.score(rows),
            ModelState::Forest(f) => Ok(rows.rows().map(|r| f.score_row(r)).collect()),
        }
    }

    /// Applies `score >= threshold`; `1` keeps the board at manual inspection.
    pub fn classify(&self, rows: &FeatureMatrix) -> Result<Vec<u8>> {
        let t = self
            .decision_threshold
            .ok_or_else(|| Error::State("decision threshold not set".into()))?;
        Ok(self.score(rows)?.into_iter().map(|s| u8::from(s >= t)).collect())
    }

    pub fn forest(&self) -> Option<&Forest> {
        match &self.state {
            ModelState::Forest(f) => Some(f),
            _ => None,
        }
    }

    pub fn save(&self, out: impl Write) -> Result<()> {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        serde_json::to_writer(out, &file)?;
        Ok(())
    }

    pub fn load(input: impl Read) -> Result<Self> {
        let file: ModelFile = serde_json::from_reader(input)?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::input(format!(
                "unsupported model file {} v{}",
                file.format, file.version
            )));
        }
        Ok(file.model)
    }
}
