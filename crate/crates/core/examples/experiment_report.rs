//! A TOML-configured multi-seed experiment written out as a report bundle.

use fcr_eval::experiment::{run_multi_seed, ExperimentConfig};
use fcr_eval::reporting::ReportBundle;

const CONFIG: &str = r#"
run_id = "example"
models = ["dummy", "knn", "balanced_random_forest"]
budget = 4
n_seeds = 3

[space]
n_trees = [10, 40]

[data]
source = "synthetic"
n_rows = 4000
prevalence = 0.02
class_separation = 5.0
"#;

fn main() -> fcr_eval::Result<()> {
    let cfg = ExperimentConfig::from_toml_str(CONFIG)?;
    let ds = cfg.data.load(std::path::Path::new("."))?;
    let aggregates = run_multi_seed(&cfg, &ds)?;
    let bundle = ReportBundle::build(&cfg, &aggregates, ds.prevalence())?;

    let out = tempfile::tempdir()?;
    let dir = bundle.write(out.path())?;
    for m in &bundle.models {
        println!(
            "{:<24} {}  {}/{} seeds pass",
            m.model, m.verdict, m.pass_count, m.n_seeds
        );
    }
    let mut files: Vec<_> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name())
        .collect();
    files.sort();
    println!("\nwrote {files:?}");
    println!("\n{}", std::fs::read_to_string(dir.join("timeline.csv"))?);
    Ok(())
}
