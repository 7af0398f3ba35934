//! Chronological partition of a dataset: the earlier half is stratified
//! into hyper-parameter and test rows, the later half becomes five
//! contiguous deployment slices.

use fcr_eval::dataset::{chrono_split, generate_synthetic, stratified_kfold, SyntheticConfig};

fn main() -> fcr_eval::Result<()> {
    let ds = generate_synthetic(&SyntheticConfig {
        n_rows: 2_000,
        prevalence: 0.02,
        ..SyntheticConfig::default()
    })?;
    let plan = chrono_split(&ds, 0)?;
    let rows = ds.rows();
    let describe = |name: &str, idx: &[usize]| {
        let defects = idx.iter().filter(|&&i| rows[i].label == 1).count();
        let first = idx.iter().map(|&i| rows[i].timestamp).min().unwrap_or(0);
        let last = idx.iter().map(|&i| rows[i].timestamp).max().unwrap_or(0);
        println!(
            "{name:<16} {:>5} rows {defects:>3} defects  time {first}..{last}",
            idx.len()
        );
    };
    describe("hyperparameter", &plan.hyperparameter);
    describe("test", &plan.test);
    for (i, s) in plan.slices.iter().enumerate() {
        describe(&format!("slice{}", i + 1), s);
    }

    let labels: Vec<u8> = plan.hyperparameter.iter().map(|&i| rows[i].label).collect();
    for (i, f) in stratified_kfold(&labels, 5, 0)?.iter().enumerate() {
        let pos = f.validation.iter().filter(|&&j| labels[j] == 1).count();
        println!(
            "fold {i}: train {} / validation {} ({pos} defects)",
            f.train.len(),
            f.validation.len()
        );
    }
    Ok(())
}
