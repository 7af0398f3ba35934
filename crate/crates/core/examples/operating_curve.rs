//! Threshold sweep over scored boards: Youden and V@S thresholds, AUC-PR
//! and the three cAUC cases.

use fcr_eval::curves::{
    auc_pr, best_youden, cauc, sweep_thresholds, threshold_for_metric, v_at_s, Criterion, LabeledScores,
};
use fcr_eval::metrics::TargetSpec;

fn main() -> fcr_eval::Result<()> {
    let targets = TargetSpec::default();
    let cases = [
        (
            "separable",
            vec![0.95, 0.9, 0.4, 0.3, 0.2, 0.1, 0.05],
            vec![1, 1, 0, 0, 0, 0, 0],
        ),
        (
            "overlap",
            vec![0.9, 0.7, 0.8, 0.6, 0.3, 0.2, 0.1],
            vec![1, 1, 0, 0, 0, 0, 0],
        ),
        (
            "defect scored low",
            vec![0.9, 0.05, 0.8, 0.6, 0.3, 0.2, 0.1],
            vec![1, 1, 0, 0, 0, 0, 0],
        ),
    ];
    for (name, scores, labels) in cases {
        let data = LabeledScores::new(scores, labels)?;
        let curve = sweep_thresholds(&data)?;
        println!("== {name}");
        for p in curve.points() {
            println!("   t {:>8}  v {:.3}  s {:.3}", fmt_t(p.threshold), p.v, p.s);
        }
        let y = best_youden(&curve)?;
        let vs = v_at_s(&curve, &targets);
        let c = cauc(&curve, &targets);
        let pick = threshold_for_metric(&curve, Criterion::VAtS(targets))?;
        println!(
            "   youden {:.3} at {}   v@s {:.3} at {}   feasible {}",
            y.value,
            fmt_t(y.threshold),
            vs.value,
            vs.threshold.map_or("none".into(), fmt_t),
            pick.feasible
        );
        println!(
            "   auc-pr {:.3}   cauc {:+.3} ({:?})\n",
            auc_pr(&data)?,
            c.value,
            c.case
        );
    }
    Ok(())
}

fn fmt_t(t: f64) -> String {
    if t.is_infinite() {
        "sentinel".into()
    } else {
        format!("{t:.3}")
    }
}
