//! Training, scoring and persisting each classifier kind.

use fcr_eval::classifiers::{train, ClassifierSpec, FeatureSubsample, ForestParams, Params, TrainedModel};
use fcr_eval::curves::{auc_pr, LabeledScores};
use fcr_eval::dataset::{generate_synthetic, one_hot_fit_transform, SyntheticConfig};

fn main() -> fcr_eval::Result<()> {
    let ds = generate_synthetic(&SyntheticConfig {
        n_rows: 4_000,
        prevalence: 0.03,
        ..SyntheticConfig::default()
    })?;
    let (m, _) = one_hot_fit_transform(&ds)?;
    let half = m.n_rows() / 2;
    let train_rows: Vec<usize> = (0..half).collect();
    let eval_rows: Vec<usize> = (half..m.n_rows()).collect();
    let (fit, held) = (m.select(&train_rows), m.select(&eval_rows));

    let forest = ForestParams {
        n_trees: 50,
        max_depth: 8,
        min_leaf: 2,
        feature_subsample: FeatureSubsample::Sqrt,
    };
    let all = [
        Params::Dummy,
        Params::Knn { k: 7 },
        Params::RandomForest(forest),
        Params::BalancedRandomForest(forest),
    ];
    for params in all {
        let model = train(&ClassifierSpec { params, seed: 1 }, &fit)?;
        let scores = model.score(&held.features)?;
        let pr = auc_pr(&LabeledScores::new(scores, held.labels.clone())?)?;
        println!(
            "{:<24} auc-pr {pr:.3}  {:?}",
            model.spec().kind().label(),
            params.to_map()
        );
    }

    // models are plain JSON and keep their decision threshold
    let mut model = train(
        &ClassifierSpec {
            params: Params::Knn { k: 7 },
            seed: 1,
        },
        &fit,
    )?;
    model.set_threshold(0.3)?;
    let mut buf = Vec::new();
    model.save(&mut buf)?;
    let back = TrainedModel::load(buf.as_slice())?;
    let flagged: usize = back.classify(&held.features)?.iter().map(|&y| y as usize).sum();
    println!(
        "\nreloaded knn, threshold {:?}: {flagged} of {} boards kept for inspection",
        back.decision_threshold(),
        held.n_rows()
    );
    Ok(())
}
