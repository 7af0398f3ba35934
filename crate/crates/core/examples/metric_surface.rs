//! Accuracy, F1 and cV over the (slip, volume reduction) plane at a given
//! defect prevalence. Accuracy rewards high v almost regardless of slip;
//! cV turns negative the moment slip crosses its target.
//!
//! `cargo run --example metric_surface -- 0.01`

use fcr_eval::metrics::{metric_surface, TargetSpec};

fn main() -> fcr_eval::Result<()> {
    let prevalence: f64 = std::env::args().nth(1).map_or(Ok(0.01), |a| a.parse()).unwrap_or(0.01);
    let targets = TargetSpec::default();
    let cells = metric_surface(prevalence, 6, &targets)?;
    println!(
        "prevalence {prevalence}, targets s <= {}, v >= {}",
        targets.s_target, targets.v_target
    );
    println!("{:>5} {:>5} {:>9} {:>7} {:>7}", "s", "v", "accuracy", "f1", "cV");
    for c in &cells {
        println!(
            "{:>5.2} {:>5.2} {:>9.4} {:>7.4} {:>+7.3}",
            c.s, c.v, c.accuracy, c.f1, c.cv
        );
    }
    let misleading = cells.iter().filter(|c| c.accuracy > 0.95 && c.cv < 0.0).count();
    println!(
        "\n{misleading} of {} cells have accuracy > 0.95 but miss the slip target",
        cells.len()
    );
    Ok(())
}
