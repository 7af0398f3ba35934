//! Random search against the density-ratio surrogate on the same budget.

use fcr_eval::classifiers::{ClassifierKind, HyperParamSpace};
use fcr_eval::dataset::{chrono_split, generate_synthetic, OneHotEncoder, SyntheticConfig};
use fcr_eval::experiment::{optimize_hyperparams, OptimizerKind, Regime, SearchSettings};
use fcr_eval::metrics::TargetSpec;

fn main() -> fcr_eval::Result<()> {
    let ds = generate_synthetic(&SyntheticConfig {
        n_rows: 6_000,
        prevalence: 0.02,
        ..SyntheticConfig::default()
    })?;
    let plan = chrono_split(&ds, 0)?;
    let hyper = OneHotEncoder::fit(&ds, &plan.hyperparameter)?.transform(&ds, &plan.hyperparameter)?;
    let space = HyperParamSpace::default();

    for optimizer in [OptimizerKind::Random, OptimizerKind::Surrogate] {
        let settings = SearchSettings {
            regime: Regime::RequirementAware,
            targets: TargetSpec::default(),
            optimizer,
            budget: 15,
            k_folds: 5,
        };
        let out = optimize_hyperparams(ClassifierKind::Knn, &space, &hyper, &settings, 0)?;
        let trace: Vec<String> = out.trials.iter().map(|t| format!("{:+.2}", t.mean_score)).collect();
        println!("{optimizer:?}: {}", trace.join(" "));
        println!(
            "  best trial {} {:?} cauc {:+.3} threshold {:.4}\n",
            out.best.index,
            out.best.spec.params.to_map(),
            out.best.mean_score,
            out.best.mean_threshold
        );
    }
    Ok(())
}
