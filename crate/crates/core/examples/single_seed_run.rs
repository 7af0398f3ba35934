//! One seed of the evaluation protocol with a probe that logs when the
//! threshold is frozen and when held-out labels are read.

use std::sync::Mutex;

use fcr_eval::classifiers::ClassifierKind;
use fcr_eval::dataset::{generate_synthetic, SyntheticConfig};
use fcr_eval::experiment::{run_algorithm1_with_probe, DataSource, ExperimentConfig, LabelProbe};

#[derive(Default)]
struct Log(Mutex<Vec<String>>);

impl LabelProbe for Log {
    fn threshold_frozen(&self, t: f64) {
        self.0.lock().unwrap().push(format!("threshold frozen at {t:.4}"));
    }
    fn labels_opened(&self, set: &str) {
        self.0.lock().unwrap().push(format!("labels opened: {set}"));
    }
}

fn main() -> fcr_eval::Result<()> {
    let data = SyntheticConfig {
        n_rows: 5_000,
        prevalence: 0.02,
        class_separation: 5.0,
        ..SyntheticConfig::default()
    };
    let ds = generate_synthetic(&data)?;
    let mut cfg = ExperimentConfig::new(vec![ClassifierKind::Knn], DataSource::Synthetic(data));
    cfg.budget = 8;

    let log = Log::default();
    let run = run_algorithm1_with_probe(&cfg, &ds, ClassifierKind::Knn, 3, &log)?;
    for line in log.0.lock().unwrap().iter() {
        println!("  {line}");
    }
    println!(
        "\nbest of {} trials: {:?} (cv score {:.3}, deployable {})",
        run.n_trials,
        run.best_trial.spec.params.to_map(),
        run.best_trial.mean_score,
        run.deployable
    );
    for rep in run.reports() {
        let m = rep.metrics.as_ref().expect("threshold was applied");
        println!(
            "{:<7} {:>4} rows {:>3} defects  slip {:.3}  v {:.3}  cV {:+.3}",
            rep.set, rep.n_rows, rep.n_defects, m.slip_rate, m.volume_reduction, m.cv
        );
    }
    Ok(())
}
