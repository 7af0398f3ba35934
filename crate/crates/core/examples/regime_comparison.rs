//! Standard selection (AUC-PR, Youden threshold) against requirement-aware
//! selection (cAUC, V@S threshold) on drifting data, over several seeds.
//!
//! `cargo run --release --example regime_comparison -- 5`

use fcr_eval::classifiers::ClassifierKind;
use fcr_eval::dataset::{generate_synthetic, SyntheticConfig};
use fcr_eval::experiment::{run_multi_seed, DataSource, ExperimentConfig, MetricName, Regime, TEST_SET};

fn main() -> fcr_eval::Result<()> {
    let n_seeds = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    let data = SyntheticConfig {
        n_rows: 10_000,
        prevalence: 0.01,
        n_clusters: 3,
        cluster_windows: vec![(0.0, 1.0), (0.5, 1.0), (0.5, 1.0)],
        class_separation: 3.5,
        ..SyntheticConfig::default()
    };
    let ds = generate_synthetic(&data)?;
    for regime in [Regime::Standard, Regime::RequirementAware] {
        let mut cfg = ExperimentConfig::new(vec![ClassifierKind::RandomForest], DataSource::Synthetic(data.clone()));
        cfg.regime = regime;
        cfg.n_seeds = n_seeds;
        let agg = &run_multi_seed(&cfg, &ds)?[0];
        let stat = |m| {
            agg.stat(TEST_SET, m)
                .map(|s| format!("{:+.3}±{:.3}", s.mean, s.std))
                .unwrap_or_default()
        };
        println!(
            "{:<18} test cV {}  slip {}  v {}  {}/{} seeds pass",
            regime.name(),
            stat(MetricName::Cv),
            stat(MetricName::Slip),
            stat(MetricName::VolumeReduction),
            agg.pass_count,
            agg.seeds.len()
        );
    }
    Ok(())
}
