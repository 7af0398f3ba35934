//! Scoring an externally produced CSV of `timestamp,score,label` rows,
//! without and with an a-priori threshold.

use std::io::Write;

use fcr_eval::experiment::{evaluate_external, MetricName};
use fcr_eval::metrics::TargetSpec;
use fcr_eval::reporting::render_evaluation;
use rand::{Rng, SeedableRng};

fn main() -> fcr_eval::Result<()> {
    let mut file = tempfile::NamedTempFile::new()?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    writeln!(file, "timestamp,score,label")?;
    for i in 0..3_000 {
        let defect = rng.random_bool(0.02);
        // later boards score lower: the supplier's model is drifting
        let centre = if defect { 0.8 - 0.3 * i as f64 / 3_000.0 } else { 0.3 };
        let score: f64 = (centre + rng.random_range(-0.25..0.25)).clamp(0.0, 1.0);
        writeln!(file, "{},{score:.4},{}", 1_700_000_000 + 30 * i, defect as u8)?;
    }
    let targets = TargetSpec::default();
    let columns = [
        MetricName::Prc,
        MetricName::VAtS,
        MetricName::Cauc,
        MetricName::Slip,
        MetricName::Cv,
    ];

    let blind = evaluate_external(file.path(), &targets, None, None)?;
    print!(
        "{}",
        render_evaluation(&[blind.overall], "supplier", &columns).to_csv()?
    );

    let eval = evaluate_external(file.path(), &targets, Some(0.45), Some(5))?;
    let reports: Vec<_> = std::iter::once(eval.overall).chain(eval.slices).collect();
    print!("\n{}", render_evaluation(&reports, "supplier", &columns).to_csv()?);
    Ok(())
}
