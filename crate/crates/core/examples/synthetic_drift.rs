//! Stationary versus drifting synthetic boards, made visible with a
//! two-component PCA of each chronological half.

use fcr_eval::dataset::{generate_synthetic, SyntheticConfig};
use fcr_eval::reporting::export_drift;

fn main() -> fcr_eval::Result<()> {
    let base = SyntheticConfig {
        n_rows: 6_000,
        prevalence: 0.01,
        ..SyntheticConfig::default()
    };
    let scenarios = [
        ("stationary", base.clone()),
        (
            "new lines late, shifted",
            SyntheticConfig {
                n_clusters: 3,
                cluster_windows: vec![(0.0, 1.0), (0.5, 1.0), (0.5, 1.0)],
                drift_strength: 2.0,
                ..base.clone()
            },
        ),
    ];
    for (name, cfg) in scenarios {
        let ds = generate_synthetic(&cfg)?;
        let drift = export_drift(&ds)?;
        let late_defects = ds.rows()[ds.len() / 2..].iter().filter(|r| r.label == 1).count();
        println!(
            "{name:<24} {} defects ({late_defects} late)  pc variance {:.2}/{:.2}  centroid shift {:.3}",
            ds.positives(),
            drift.explained_variance[0],
            drift.explained_variance[1],
            drift.centroid_shift
        );
    }
    Ok(())
}
