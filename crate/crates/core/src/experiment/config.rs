use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifiers::{ClassifierKind, HyperParamSpace};
use crate::dataset::{generate_synthetic, load_csv, Dataset, LoadOptions, MissingPolicy, SyntheticConfig};
use crate::error::{Error, Result};
use crate::metrics::TargetSpec;

use super::optimizer::OptimizerKind;

/// Which metric drives model selection and threshold choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// AUC-PR selects hyper-parameters, the Youden argmax sets thresholds.
    Standard,
    /// cAUC selects hyper-parameters, the V@S argmax sets thresholds.
    #[default]
    RequirementAware,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Standard => "standard",
            Regime::RequirementAware => "requirement_aware",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSource {
    /// Relative paths resolve against the config file's directory.
    pub path: PathBuf,
    #[serde(default = "default_timestamp")]
    pub timestamp_column: String,
    #[serde(default = "default_label")]
    pub label_column: String,
    #[serde(default)]
    pub positive_label: Option<String>,
    #[serde(default)]
    pub missing: MissingPolicy,
}

fn default_timestamp() -> String {
    "timestamp".into()
}

fn default_label() -> String {
    "label".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum DataSource {
    Csv(CsvSource),
    Synthetic(SyntheticConfig),
}

impl DataSource {
    pub fn load(&self, base_dir: &Path) -> Result<Dataset> {
        match self {
            DataSource::Synthetic(cfg) => generate_synthetic(cfg),
            DataSource::Csv(src) => {
                let path = if src.path.is_absolute() {
                    src.path.clone()
                } else {
                    base_dir.join(&src.path)
                };
                let opts = LoadOptions {
                    timestamp_column: src.timestamp_column.clone(),
                    label_column: src.label_column.clone(),
                    positive_label: src.positive_label.clone(),
                    kind_overrides: HashMap::new(),
                    missing: src.missing,
                };
                load_csv(path, &opts)
            }
        }
    }
}

fn default_budget() -> usize {
    20
}

fn default_k_folds() -> usize {
    5
}

fn default_n_seeds() -> usize {
    10
}

fn default_run_id() -> String {
    "run".into()
}

/// Full description of a multi-seed experiment; see `docs/config.md` for
/// the file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_run_id")]
    pub run_id: String,
    pub models: Vec<ClassifierKind>,
    #[serde(default)]
    pub regime: Regime,
    #[serde(default)]
    pub targets: TargetSpec,
    #[serde(default)]
    pub optimizer: OptimizerKind,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_k_folds")]
    pub k_folds: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Seeds `base_seed, base_seed + 1, ...`.
    #[serde(default = "default_n_seeds")]
    pub n_seeds: usize,
    #[serde(default)]
    pub space: HyperParamSpace,
    pub data: DataSource,
}

impl ExperimentConfig {
    /// Config with defaults for everything but the models and data.
    pub fn new(models: Vec<ClassifierKind>, data: DataSource) -> Self {
        Self {
            run_id: default_run_id(),
            models,
            regime: Regime::default(),
            targets: TargetSpec::default(),
            optimizer: OptimizerKind::default(),
            budget: default_budget(),
            k_folds: default_k_folds(),
            base_seed: 0,
            n_seeds: default_n_seeds(),
            space: HyperParamSpace::default(),
            data,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.n_seeds as u64)
            .map(|i| self.base_seed.wrapping_add(i))
            .collect()
    }

    /// Reports every violation at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.models.is_empty() {
            problems.push("models must list at least one classifier".to_string());
        }
        if self.budget < 1 {
            problems.push("budget must be at least 1".into());
        }
        if self.k_folds < 2 {
            problems.push("k_folds must be at least 2".into());
        }
        if self.n_seeds < 1 {
            problems.push("n_seeds must be at least 1".into());
        }
        if let Err(e) = self.targets.validate() {
            problems.push(e.to_string());
        }
        if self.run_id.is_empty() || self.run_id.contains(['/', '\\']) || self.run_id == ".." {
            problems.push(format!("run_id {:?} is not a plain directory name", self.run_id));
        }
        problems.extend(self.space.problems());
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }
}
