//! Command-line interface: flag parsing, JSON config merging, and the
//! drivers behind each subcommand.
//!
//! Resolution order for every setting is command-line flag, then config
//! file, then built-in default. Settings without a safe default — the test
//! characteristics, and the prior for single-scenario commands — must be
//! supplied explicitly. Exit codes: `0` success, `2` configuration error
//! (bad flags, malformed config, out-of-range values), `3` runtime failure
//! (unreadable dataset, degenerate training, I/O).

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;
use thiserror::Error;

use crate::bayes::{
    breakeven_prior, build_event_tree, posterior_report, prevalence_sweep, BayesError,
    Prevalence, SweepCurve, TestCharacteristics,
};
use crate::diagnostics::{diagnose, GROUPED_HOLDOUT};
use crate::replica::{
    compare_protocols, evaluate_grouped_loo, evaluate_leaked, generate_synthetic_dataset,
    DatasetSpec, Hyperparams, ScoringConfig, SyntheticDataset, DEFAULT_LEAKAGE_THRESHOLD_PP,
};
use crate::report::{self, csv as report_csv, svg, text};
use crate::sim::{simulate_screening, SimulationConfig};

/// Seed used when neither `--seed` nor the dataset spec provides one.
pub const DEFAULT_SEED: u64 = 42;
/// Population behind expected-count artifacts when none is given.
pub const DEFAULT_POPULATION: u64 = 1000;
/// Monte-Carlo replicates when `--replicates` is absent.
pub const DEFAULT_REPLICATES: u32 = 1000;
/// Default sweep grid: 200 log-spaced priors over [1e-5, 0.5].
pub const DEFAULT_GRID_MIN: f64 = 1e-5;
pub const DEFAULT_GRID_MAX: f64 = 0.5;
pub const DEFAULT_GRID_POINTS: usize = 200;

#[derive(Debug, Parser)]
#[command(
    name = "screenaudit",
    version,
    about = "Audit base-rate behaviour and evaluation hygiene of binary screening tests"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Posterior audit of one (test, prior, population) scenario
    Posterior(ScenarioArgs),
    /// PPV/NPV curves over a grid of priors
    Sweep(SweepArgs),
    /// Natural-frequency event tree for one scenario
    Tree(ScenarioArgs),
    /// Monte-Carlo simulation of repeated screenings
    Simulate(SimulateArgs),
    /// Train classifiers under grouped and segment-level cross-validation
    Replicate(ReplicateArgs),
    /// Construct checks for a grouped segment dataset
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON configuration file; flags override its fields
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory that receives the artifacts
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Master seed (overrides the dataset seed and the simulation seed)
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// P(flagged | condition present), in [0, 1]
    #[arg(long)]
    pub sensitivity: Option<f64>,
    /// P(cleared | condition absent), in [0, 1]
    #[arg(long)]
    pub specificity: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub test: TestArgs,
    /// Prior probability of the condition, in [0, 1]
    #[arg(long)]
    pub prior: Option<f64>,
    /// Number of people screened (for expected counts)
    #[arg(long)]
    pub population: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub test: TestArgs,
    /// Smallest prior on the grid
    #[arg(long)]
    pub grid_min: Option<f64>,
    /// Largest prior on the grid
    #[arg(long)]
    pub grid_max: Option<f64>,
    /// Number of grid points (log-spaced when grid-min > 0)
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Prior marked on the figure and guaranteed a grid point when in range
    #[arg(long, default_value_t = 0.05)]
    pub highlight: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub test: TestArgs,
    /// Prior probability of the condition, in [0, 1]
    #[arg(long)]
    pub prior: Option<f64>,
    /// Number of people screened per replicate
    #[arg(long)]
    pub population: Option<u64>,
    /// Number of independent replicates
    #[arg(long)]
    pub replicates: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ReplicateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Import a segment CSV instead of generating a synthetic dataset
    #[arg(long, value_name = "FILE")]
    pub dataset: Option<PathBuf>,
    /// Write the dataset that was evaluated to this CSV file
    #[arg(long, value_name = "FILE")]
    pub export_dataset: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Import a segment CSV instead of generating a synthetic dataset
    #[arg(long, value_name = "FILE")]
    pub dataset: Option<PathBuf>,
}

// ───────────────────────────── config file ─────────────────────────────

/// `test` block of the config file.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestConfig {
    pub sensitivity: f64,
    pub specificity: f64,
}

/// `hyperparams` block: network settings plus fold counts.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub hidden_width: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub grouped_folds: usize,
    pub leaked_folds: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        let hp = Hyperparams::default();
        Self {
            hidden_width: hp.hidden_width,
            learning_rate: hp.learning_rate,
            epochs: hp.epochs,
            grouped_folds: 9,
            leaked_folds: 10,
        }
    }
}

impl TrainingConfig {
    #[must_use]
    pub fn hyperparams(&self) -> Hyperparams {
        Hyperparams {
            hidden_width: self.hidden_width,
            learning_rate: self.learning_rate,
            epochs: self.epochs,
        }
    }
}

/// Root of the JSON config file. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub test: Option<TestConfig>,
    pub prior: Option<f64>,
    pub population: Option<u64>,
    pub dataset_spec: Option<DatasetSpec>,
    pub hyperparams: Option<TrainingConfig>,
    pub scoring: Option<ScoringConfig>,
}

// ─────────────────────────────── errors ───────────────────────────────

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or config values; exits with code 2.
    #[error("{0}")]
    Config(String),
    /// Failure while doing the work; exits with code 3.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    #[must_use]
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

// ───────────────────────────── resolution ─────────────────────────────

fn load_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

fn resolve_test(flags: &TestArgs, cfg: &FileConfig) -> Result<TestCharacteristics, CliError> {
    let sensitivity = flags.sensitivity.or(cfg.test.map(|t| t.sensitivity));
    let specificity = flags.specificity.or(cfg.test.map(|t| t.specificity));
    match (sensitivity, specificity) {
        (Some(sens), Some(spec)) => TestCharacteristics::new(sens, spec).map_err(config_err),
        (None, _) => Err(CliError::Config(
            "sensitivity is required: pass --sensitivity or set test.sensitivity in the config"
                .into(),
        )),
        (_, None) => Err(CliError::Config(
            "specificity is required: pass --specificity or set test.specificity in the config"
                .into(),
        )),
    }
}

fn resolve_prior(flag: Option<f64>, cfg: &FileConfig) -> Result<Prevalence, CliError> {
    let p = flag.or(cfg.prior).ok_or_else(|| {
        CliError::Config("prior is required: pass --prior or set prior in the config".into())
    })?;
    Prevalence::new(p).map_err(config_err)
}

fn resolve_population(flag: Option<u64>, cfg: &FileConfig) -> u64 {
    flag.or(cfg.population).unwrap_or(DEFAULT_POPULATION)
}

/// Dataset for `replicate`/`diagnose`: imported from CSV, or generated from
/// the configured spec with `--seed` taking precedence over the spec's seed.
fn resolve_dataset(
    dataset: Option<&Path>,
    common: &CommonArgs,
    cfg: &FileConfig,
) -> Result<SyntheticDataset, CliError> {
    match dataset {
        Some(path) => {
            let file = fs::File::open(path).map_err(|e| {
                CliError::Runtime(format!("cannot open dataset {}: {e}", path.display()))
            })?;
            SyntheticDataset::read_csv(io::BufReader::new(file))
                .map_err(|e| CliError::Runtime(format!("dataset {}: {e}", path.display())))
        }
        None => {
            let mut spec = cfg.dataset_spec.clone().unwrap_or_default();
            if let Some(seed) = common.seed {
                spec.seed = seed;
            }
            spec.validate().map_err(config_err)?;
            generate_synthetic_dataset(&spec).map_err(runtime_err)
        }
    }
}

/// Grid of priors: log-spaced when the minimum is positive, linear
/// otherwise, with exact endpoints and an optional injected highlight.
fn build_grid(
    min: f64,
    max: f64,
    points: usize,
    highlight: Option<f64>,
) -> Result<Vec<f64>, CliError> {
    if !min.is_finite() || !max.is_finite() || min < 0.0 || max > 1.0 {
        return Err(CliError::Config(format!(
            "grid bounds must lie in [0, 1], got {min} to {max}"
        )));
    }
    if points == 0 {
        return Err(CliError::Config("grid-points must be at least 1".into()));
    }
    let mut grid = if points == 1 {
        vec![min]
    } else {
        if max <= min {
            return Err(CliError::Config(format!(
                "grid-max must exceed grid-min, got {min} to {max}"
            )));
        }
        let steps = (points - 1) as f64;
        let mut g: Vec<f64> = if min > 0.0 {
            let (lo, hi) = (min.log10(), max.log10());
            (0..points)
                .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / steps))
                .collect()
        } else {
            (0..points)
                .map(|i| min + (max - min) * i as f64 / steps)
                .collect()
        };
        g[0] = min;
        g[points - 1] = max;
        g
    };
    if let Some(h) = highlight {
        if h >= min && h <= max {
            grid.push(h);
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

// ───────────────────────────── artifacts ─────────────────────────────

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(runtime_err)?;
    text.push('\n');
    write_artifact(dir, name, &text)
}

fn echo_effective_config(
    dir: &Path,
    command: &str,
    fields: serde_json::Value,
) -> Result<(), CliError> {
    let mut value = json!({ "command": command });
    if let (Some(obj), Some(extra)) = (value.as_object_mut(), fields.as_object()) {
        for (k, v) in extra {
            if !v.is_null() {
                obj.insert(k.clone(), v.clone());
            }
        }
    }
    write_json(dir, "effective_config.json", &value)?;
    Ok(())
}

// ────────────────────────────── drivers ──────────────────────────────

fn run_posterior(args: &ScenarioArgs) -> Result<(), CliError> {
    let cfg = load_config(args.common.config.as_deref())?;
    let test = resolve_test(&args.test, &cfg)?;
    let prior = resolve_prior(args.prior, &cfg)?;
    let population = resolve_population(args.population, &cfg);

    let report = posterior_report(&test, prior, population);
    print!("{}", text::posterior_summary(&report));
    write_json(
        &args.common.out,
        "posterior.json",
        &serde_json::to_value(&report).map_err(runtime_err)?,
    )?;
    echo_effective_config(
        &args.common.out,
        "posterior",
        json!({
            "test": { "sensitivity": test.sensitivity, "specificity": test.specificity },
            "prior": prior.value(),
            "population": population,
        }),
    )
}

fn run_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let cfg = load_config(args.common.config.as_deref())?;
    let test = resolve_test(&args.test, &cfg)?;
    let min = args.grid_min.unwrap_or(DEFAULT_GRID_MIN);
    let max = args.grid_max.unwrap_or(DEFAULT_GRID_MAX);
    let points = args.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
    let grid = build_grid(min, max, points, Some(args.highlight))?;

    let curve: SweepCurve = prevalence_sweep(&test, &grid).map_err(config_err)?;

    let mut csv_buf = Vec::new();
    report_csv::write_sweep(&mut csv_buf, &curve).map_err(runtime_err)?;
    let csv_text = String::from_utf8(csv_buf).map_err(runtime_err)?;
    write_artifact(&args.common.out, "sweep.csv", &csv_text)?;
    write_artifact(
        &args.common.out,
        "sweep.svg",
        &svg::sweep_svg(&curve, Some(args.highlight)),
    )?;

    println!(
        "swept {} priors from {:e} to {:e}",
        curve.points.len(),
        grid.first().copied().unwrap_or_default(),
        grid.last().copied().unwrap_or_default(),
    );
    if let Some(point) = curve.points.iter().find(|p| p.prior == args.highlight) {
        println!(
            "at prior {}: PPV {}, NPV {}",
            report::percent(point.prior),
            report::opt_percent(point.ppv),
            report::opt_percent(point.npv),
        );
    }
    match breakeven_prior(&test, 0.5) {
        Ok(p) => println!(
            "prior needed for PPV to reach 50.00%: {}",
            report::percent(p.value())
        ),
        Err(BayesError::UnreachableTarget(why)) => {
            println!("prior needed for PPV to reach 50.00%: none ({why})");
        }
        Err(e) => return Err(runtime_err(e)),
    }
    echo_effective_config(
        &args.common.out,
        "sweep",
        json!({
            "test": { "sensitivity": test.sensitivity, "specificity": test.specificity },
            "grid": { "min": min, "max": max, "points": points, "highlight": args.highlight },
        }),
    )
}

fn run_tree(args: &ScenarioArgs) -> Result<(), CliError> {
    let cfg = load_config(args.common.config.as_deref())?;
    let test = resolve_test(&args.test, &cfg)?;
    let prior = resolve_prior(args.prior, &cfg)?;
    let population = resolve_population(args.population, &cfg);

    let tree = build_event_tree(&test, prior, population);
    print!("{}", text::tree_text(&tree));
    write_artifact(&args.common.out, "tree.svg", &svg::tree_svg(&tree))?;
    echo_effective_config(
        &args.common.out,
        "tree",
        json!({
            "test": { "sensitivity": test.sensitivity, "specificity": test.specificity },
            "prior": prior.value(),
            "population": population,
        }),
    )
}

fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let cfg = load_config(args.common.config.as_deref())?;
    let test = resolve_test(&args.test, &cfg)?;
    let prior = resolve_prior(args.prior, &cfg)?;
    let population = resolve_population(args.population, &cfg);
    let replicates = args.replicates.unwrap_or(DEFAULT_REPLICATES);
    let master_seed = args.common.seed.unwrap_or(DEFAULT_SEED);

    let config = SimulationConfig {
        test: test.clone(),
        prior,
        population_size: population,
        replicates,
        master_seed,
    };
    config.validate().map_err(config_err)?;
    let result = simulate_screening(&config).map_err(runtime_err)?;
    print!("{}", text::simulation_summary(&result));

    let mut csv_buf = Vec::new();
    report_csv::write_replicates(&mut csv_buf, &result.per_replicate).map_err(runtime_err)?;
    let csv_text = String::from_utf8(csv_buf).map_err(runtime_err)?;
    write_artifact(&args.common.out, "replicates.csv", &csv_text)?;

    let closed_form = posterior_report(&test, prior, population);
    write_json(
        &args.common.out,
        "summary.json",
        &json!({
            "config": config,
            "mean_true_positive": result.mean_true_positive,
            "mean_false_positive": result.mean_false_positive,
            "mean_false_negative": result.mean_false_negative,
            "mean_true_negative": result.mean_true_negative,
            "mean_referrals": result.mean_referrals,
            "empirical_ppv": result.empirical_ppv,
            "empirical_npv": result.empirical_npv,
            "closed_form_ppv": closed_form.ppv,
            "closed_form_npv": closed_form.npv,
        }),
    )?;
    echo_effective_config(
        &args.common.out,
        "simulate",
        json!({
            "test": { "sensitivity": test.sensitivity, "specificity": test.specificity },
            "prior": prior.value(),
            "population": population,
            "replicates": replicates,
            "seed": master_seed,
        }),
    )
}

fn run_replicate(args: &ReplicateArgs) -> Result<(), CliError> {
    let cfg = load_config(args.common.config.as_deref())?;
    let training = cfg.hyperparams.unwrap_or_default();
    let hyperparams = training.hyperparams();
    hyperparams.validate().map_err(config_err)?;
    let scoring = cfg.scoring.unwrap_or_default();
    scoring.validate().map_err(config_err)?;

    let dataset = resolve_dataset(args.dataset.as_deref(), &args.common, &cfg)?;
    let eval_seed = args.common.seed.unwrap_or(dataset.spec.seed);

    let grouped = evaluate_grouped_loo(
        &dataset,
        &hyperparams,
        &scoring,
        training.grouped_folds,
        eval_seed,
    )
    .map_err(runtime_err)?;
    let leaked = evaluate_leaked(
        &dataset,
        &hyperparams,
        &scoring,
        training.leaked_folds,
        eval_seed,
    )
    .map_err(runtime_err)?;
    let gap = compare_protocols(&grouped, &leaked, DEFAULT_LEAKAGE_THRESHOLD_PP);
    print!("{}", text::protocol_table(&grouped, &leaked, &gap));

    let out = &args.common.out;
    let mut buf = Vec::new();
    report_csv::write_fold_table(&mut buf, &grouped).map_err(runtime_err)?;
    write_artifact(out, "grouped.csv", &String::from_utf8(buf).map_err(runtime_err)?)?;
    let mut buf = Vec::new();
    report_csv::write_fold_table(&mut buf, &leaked).map_err(runtime_err)?;
    write_artifact(out, "leaked.csv", &String::from_utf8(buf).map_err(runtime_err)?)?;
    let mut buf = Vec::new();
    report_csv::write_combined_folds(&mut buf, &grouped, &leaked).map_err(runtime_err)?;
    write_artifact(out, "folds.csv", &String::from_utf8(buf).map_err(runtime_err)?)?;
    write_json(
        out,
        "gap.json",
        &json!({ "gap": gap, "grouped": grouped, "leaked": leaked }),
    )?;

    if let Some(path) = &args.export_dataset {
        let file = fs::File::create(path).map_err(|e| {
            CliError::Runtime(format!("cannot create {}: {e}", path.display()))
        })?;
        dataset
            .write_csv(io::BufWriter::new(file))
            .map_err(|e| CliError::Runtime(format!("export {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }

    echo_effective_config(
        out,
        "replicate",
        json!({
            "dataset_spec": dataset.spec,
            "hyperparams": {
                "hidden_width": training.hidden_width,
                "learning_rate": training.learning_rate,
                "epochs": training.epochs,
                "grouped_folds": training.grouped_folds,
                "leaked_folds": training.leaked_folds,
            },
            "scoring": scoring,
            "seed": eval_seed,
        }),
    )
}

fn run_diagnose(args: &DiagnoseArgs) -> Result<(), CliError> {
    let cfg = load_config(args.common.config.as_deref())?;
    let dataset = resolve_dataset(args.dataset.as_deref(), &args.common, &cfg)?;
    let report = diagnose(&dataset, GROUPED_HOLDOUT).map_err(runtime_err)?;
    print!("{}", text::diagnostics_summary(&report));
    write_json(
        &args.common.out,
        "diagnostics.json",
        &serde_json::to_value(&report).map_err(runtime_err)?,
    )?;
    echo_effective_config(
        &args.common.out,
        "diagnose",
        json!({
            "dataset_spec": dataset.spec,
            "held_out": GROUPED_HOLDOUT,
        }),
    )
}

/// Run a parsed command.
pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Posterior(args) => run_posterior(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Tree(args) => run_tree(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Replicate(args) => run_replicate(args),
        Command::Diagnose(args) => run_diagnose(args),
    }
}

/// Parse `std::env::args` and run; returns the process exit code.
#[must_use]
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version print to stdout and exit 0; real parse
            // errors go to stderr and exit 2 like any config error.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_fields() {
        let cfg: FileConfig = serde_json::from_str(
            r#"{ "test": { "sensitivity": 0.9, "specificity": 0.8 }, "prior": 0.1 }"#,
        )
        .unwrap();
        let flags = TestArgs { sensitivity: Some(0.7366), specificity: None };
        let test = resolve_test(&flags, &cfg).unwrap();
        assert_eq!(test.sensitivity, 0.7366);
        assert_eq!(test.specificity, 0.8);
        assert_eq!(resolve_prior(Some(0.05), &cfg).unwrap().value(), 0.05);
        assert_eq!(resolve_prior(None, &cfg).unwrap().value(), 0.1);
    }

    #[test]
    fn missing_requirements_are_config_errors() {
        let cfg = FileConfig::default();
        let none = TestArgs { sensitivity: None, specificity: None };
        let err = resolve_test(&none, &cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("sensitivity"), "{err}");

        let err = resolve_prior(None, &cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("prior"), "{err}");
    }

    #[test]
    fn unknown_config_keys_are_rejected_by_name() {
        let err = serde_json::from_str::<FileConfig>(r#"{ "sensibility": 0.9 }"#).unwrap_err();
        assert!(err.to_string().contains("sensibility"), "{err}");
        let err = serde_json::from_str::<FileConfig>(
            r#"{ "hyperparams": { "widths": 4 } }"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("widths"), "{err}");
    }

    #[test]
    fn config_blocks_fill_defaults_per_field() {
        let cfg: FileConfig = serde_json::from_str(
            r#"{ "hyperparams": { "epochs": 50 }, "scoring": { "theta_lo": 0.4, "theta_hi": 0.6 } }"#,
        )
        .unwrap();
        let training = cfg.hyperparams.unwrap();
        assert_eq!(training.epochs, 50);
        assert_eq!(training.hidden_width, 16);
        assert_eq!(training.grouped_folds, 9);
        let scoring = cfg.scoring.unwrap();
        assert_eq!(scoring.theta_lo, 0.4);
        assert_eq!(scoring.decision_threshold, 0.5);
    }

    #[test]
    fn grid_injects_the_highlight_and_pins_endpoints() {
        let grid = build_grid(1e-5, 0.5, 200, Some(0.05)).unwrap();
        assert_eq!(grid.len(), 201);
        assert_eq!(grid[0], 1e-5);
        assert_eq!(*grid.last().unwrap(), 0.5);
        assert!(grid.contains(&0.05));
        assert!(grid.windows(2).all(|w| w[0] < w[1]), "not strictly increasing");

        // Out-of-range highlight is ignored; single-point grids collapse.
        assert_eq!(build_grid(0.1, 0.2, 2, Some(0.5)).unwrap(), vec![0.1, 0.2]);
        assert_eq!(build_grid(0.05, 0.5, 1, None).unwrap(), vec![0.05]);
        // Zero minimum falls back to linear spacing.
        let linear = build_grid(0.0, 0.4, 5, None).unwrap();
        assert_eq!(linear, vec![0.0, 0.1, 0.2, 0.30000000000000004, 0.4]);
    }

    #[test]
    fn bad_grids_are_config_errors() {
        assert_eq!(build_grid(0.5, 0.1, 10, None).unwrap_err().exit_code(), 2);
        assert_eq!(build_grid(-0.1, 0.5, 10, None).unwrap_err().exit_code(), 2);
        assert_eq!(build_grid(0.0, 1.5, 10, None).unwrap_err().exit_code(), 2);
        assert_eq!(build_grid(0.1, 0.5, 0, None).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn cli_parses_every_subcommand() {
        use clap::CommandFactory;
        Cli::command().debug_assert();

        let cli = Cli::try_parse_from([
            "screenaudit",
            "posterior",
            "--sensitivity",
            "0.7366",
            "--specificity",
            "0.7555",
            "--prior",
            "0.05",
        ])
        .unwrap();
        assert!(matches!(cli.command, Command::Posterior(_)));

        let cli = Cli::try_parse_from(["screenaudit", "replicate", "--seed", "7"]).unwrap();
        match cli.command {
            Command::Replicate(args) => assert_eq!(args.common.seed, Some(7)),
            other => panic!("unexpected command {other:?}"),
        }
    }
}
