use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fcr_eval::dataset::{generate_synthetic, load_csv, LoadOptions, MissingPolicy, SyntheticConfig};
use fcr_eval::experiment::{evaluate_external, run_multi_seed, DataSource, ExperimentConfig, MetricName, TEST_SET};
use fcr_eval::metrics::TargetSpec;
use fcr_eval::reporting::{
    curve_export, curves_to_csv, export_drift, export_surface, parse_columns, render_evaluation, to_json, write_pair,
    ReportBundle,
};
use fcr_eval::{Error, Result};

/// Requirement-aware evaluation of false-call-reduction classifiers.
#[derive(Parser)]
#[command(name = "fcr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score an external CSV with `score` and `label` columns.
    Evaluate {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        s_target: f64,
        #[arg(long, default_value_t = 0.4)]
        v_target: f64,
        /// Decision threshold fixed before looking at this file.
        #[arg(long)]
        threshold: Option<f64>,
        /// Also report N chronological slices (needs a `timestamp` column).
        #[arg(long, value_name = "N")]
        slices_by_timestamp: Option<usize>,
        /// Comma-separated metric columns for the table.
        #[arg(long, value_delimiter = ',')]
        metrics: Option<Vec<String>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a multi-seed experiment from a TOML config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic dataset described by a TOML config.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Two-component PCA of a dataset, split by chronological half.
    Drift {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "timestamp")]
        timestamp_column: String,
        #[arg(long, default_value = "label")]
        label_column: String,
        #[arg(long)]
        positive_label: Option<String>,
        #[arg(long)]
        impute_median: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Accuracy, F1 and cV over a grid of slip and volume-reduction rates.
    Surface {
        #[arg(long)]
        prevalence: f64,
        #[arg(long, default_value_t = 0.01)]
        s_target: f64,
        #[arg(long, default_value_t = 0.4)]
        v_target: f64,
        #[arg(long, default_value_t = 21)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 2 } else { 1 })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Evaluate {
            scores,
            s_target,
            v_target,
            threshold,
            slices_by_timestamp,
            metrics,
            out,
        } => evaluate(
            &scores,
            TargetSpec::new(s_target, v_target)?,
            threshold,
            slices_by_timestamp,
            metrics,
            &out,
        ),
        Command::Experiment { config, out } => experiment(&config, &out),
        Command::Generate { config, out } => generate(&config, &out),
        Command::Drift {
            data,
            timestamp_column,
            label_column,
            positive_label,
            impute_median,
            out,
        } => {
            let opts = LoadOptions {
                timestamp_column,
                label_column,
                positive_label,
                missing: if impute_median {
                    MissingPolicy::ImputeMedian
                } else {
                    MissingPolicy::Reject
                },
                ..LoadOptions::default()
            };
            let drift = export_drift(&load_csv(&data, &opts)?)?;
            fs::create_dir_all(&out)?;
            write_pair(&out, "drift", &drift.to_csv()?, &to_json(&drift)?)?;
            println!(
                "{} rows, explained variance {:.3} / {:.3} of {:.3}, centroid shift {:.3}",
                drift.n_rows,
                drift.explained_variance[0],
                drift.explained_variance[1],
                drift.total_variance,
                drift.centroid_shift
            );
            Ok(())
        }
        Command::Surface {
            prevalence,
            s_target,
            v_target,
            resolution,
            out,
        } => {
            let surface = export_surface(prevalence, resolution, &TargetSpec::new(s_target, v_target)?)?;
            fs::create_dir_all(&out)?;
            write_pair(&out, "surface", &surface.to_csv()?, &to_json(&surface)?)?;
            println!("{} cells written to {}", surface.cells.len(), out.display());
            Ok(())
        }
    }
}

fn evaluate(
    scores: &Path,
    targets: TargetSpec,
    threshold: Option<f64>,
    slices: Option<usize>,
    metrics: Option<Vec<String>>,
    out: &Path,
) -> Result<()> {
    let columns = match metrics {
        Some(names) => parse_columns(&names)?,
        None => MetricName::ALL.to_vec(),
    };
    let eval = evaluate_external(scores, &targets, threshold, slices)?;
    let source = scores
        .file_name()
        .map_or("scores".into(), |n| n.to_string_lossy().into_owned());
    let reports: Vec<_> = std::iter::once(eval.overall.clone())
        .chain(eval.slices.iter().cloned())
        .collect();
    let table = render_evaluation(&reports, &source, &columns);
    fs::create_dir_all(out)?;
    write_pair(out, "table", &table.to_csv()?, &to_json(&table)?)?;
    if let Some(curve) = &eval.curve {
        let export = [curve_export(&source, None, &eval.overall.set, curve, &targets)];
        write_pair(out, "curve", &curves_to_csv(&export)?, &to_json(&export)?)?;
    }
    for row in &table.rows {
        let cells: Vec<String> = row
            .cells
            .iter()
            .map(|c| format!("{}={}", c.metric, c.cell.to_csv()))
            .collect();
        println!("{}: {}", row.set, cells.join(" "));
    }
    Ok(())
}

fn experiment(config: &Path, out: &Path) -> Result<()> {
    let cfg = ExperimentConfig::from_file(config)?;
    let base_dir = config.parent().unwrap_or(Path::new("."));
    let ds = cfg.data.load(base_dir)?;
    let aggregates = run_multi_seed(&cfg, &ds)?;
    let bundle = ReportBundle::build(&cfg, &aggregates, ds.prevalence())?;
    let dir = bundle.write(out)?;
    for m in &bundle.models {
        let cv = m.mean_test_cv.map_or("n/a".into(), |x| format!("{x:.3}"));
        println!(
            "{} [{}]: {} (mean {TEST_SET} cV {cv}, {}/{} seeds pass, {}/{} deployable)",
            m.model, m.regime, m.verdict, m.pass_count, m.n_seeds, m.deployable_count, m.n_seeds
        );
    }
    println!("reports written to {}", dir.display());
    Ok(())
}

fn generate(config: &Path, out: &Path) -> Result<()> {
    let text = fs::read_to_string(config).map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
    let synth: SyntheticConfig = match toml::from_str(&text) {
        Ok(s) => s,
        Err(direct) => match ExperimentConfig::from_toml_str(&text) {
            Ok(ExperimentConfig {
                data: DataSource::Synthetic(s),
                ..
            }) => s,
            Ok(_) => return Err(Error::Config("experiment config does not use synthetic data".into())),
            Err(_) => return Err(Error::Config(format!("{}: {direct}", config.display()))),
        },
    };
    let ds = generate_synthetic(&synth)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let file = fs::File::create(out)?;
    fcr_eval::dataset::write_csv(&ds, std::io::BufWriter::new(file))?;
    println!(
        "{} rows, {} defects written to {}",
        ds.len(),
        ds.positives(),
        out.display()
    );
    Ok(())
}
