//! Confusion counts to slip, volume reduction and the constrained volume cV.
//!
//! The majority-class board classifier looks excellent on accuracy while
//! letting every defect through; cV exposes it.

use fcr_eval::metrics::{ConfusionCounts, MetricReport, TargetSpec};

fn show(name: &str, cc: &ConfusionCounts, targets: &TargetSpec) -> fcr_eval::Result<()> {
    let r = MetricReport::from_counts(cc, targets)?;
    println!(
        "{name:<22} acc {:.4}  f1 {:.4}  v {:.3}  s {:.3}  cV {:+.3}{}",
        r.accuracy,
        r.f1,
        r.volume_reduction,
        r.slip_rate,
        r.cv,
        if r.slip_at_target {
            "  (slip exactly at target)"
        } else {
            ""
        }
    );
    Ok(())
}

fn main() -> fcr_eval::Result<()> {
    let targets = TargetSpec::new(0.01, 0.4)?;
    println!("targets: s <= {}, v >= {}\n", targets.s_target, targets.v_target);

    // 10 000 boards, 1% defective
    show("flag nothing", &ConfusionCounts::new(0, 0, 9_900, 100), &targets)?;
    show("flag everything", &ConfusionCounts::new(100, 9_900, 0, 0), &targets)?;
    // one slipped defect out of 100 sits exactly at s_target
    show("one slip of 100", &ConfusionCounts::new(99, 10, 9_890, 1), &targets)?;
    show("two slips of 100", &ConfusionCounts::new(98, 10, 9_890, 2), &targets)?;
    show(
        "no slip, 60% removed",
        &ConfusionCounts::new(100, 3_960, 5_940, 0),
        &targets,
    )?;
    Ok(())
}
