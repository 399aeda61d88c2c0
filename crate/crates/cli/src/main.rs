//! Command-line front end: load matrix or experiment configs, dispatch the
//! computation, write JSON/CSV reports.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage error (bad arguments
//! or missing input file). All randomness flows through the config or
//! `--seed` override; the binary draws no ambient entropy.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use jacobi_core::eigen::eigendecompose;
use jacobi_core::experiment::{self, ExperimentConfig, ExperimentKind};
use jacobi_core::measure::{check_semiinfinite_relation, site_measure};
use jacobi_core::operator::{BasisIndex, JacobiOperator};

#[derive(Parser)]
#[command(
    name = "jacobi",
    version,
    about = "Spectral toolkit for finite Jacobi operators with random potentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and eigenvectors of a matrix file, as JSON
    Spectrum {
        /// Matrix file {"lo", "hi", "a", "omega"}
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Spectral measure of one site, as CSV (location,weight)
    Measure {
        #[arg(long)]
        input: PathBuf,
        /// Site whose measure is dumped
        #[arg(long)]
        site: i64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Residuals of the edge-anchored measure transport relations, as JSON
    Relation {
        #[arg(long)]
        input: PathBuf,
        /// Restrict to one site (default: all sites)
        #[arg(long)]
        site: Option<i64>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run an experiment config and write its report
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config trial count
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Print the deterministic free-matrix counterexample table
    Counterexample {
        /// Also write the report as JSON
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Partial sums of the self-adjointness series, from a carleman config
    Carleman {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
}

impl Command {
    /// Paths that must already exist; checked before any work runs.
    fn input_paths(&self) -> Vec<&Path> {
        match self {
            Command::Spectrum { input, .. }
            | Command::Measure { input, .. }
            | Command::Relation { input, .. } => vec![input],
            Command::Experiment { config, .. } | Command::Carleman { config, .. } => vec![config],
            Command::Counterexample { .. } => Vec::new(),
        }
    }

    fn output_path(&self) -> Option<&Path> {
        match self {
            Command::Spectrum { output, .. }
            | Command::Measure { output, .. }
            | Command::Relation { output, .. }
            | Command::Experiment { output, .. }
            | Command::Carleman { output, .. } => Some(output),
            Command::Counterexample { output } => output.as_deref(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    for path in cli.command.input_paths() {
        if !path.is_file() {
            eprintln!("jacobi: no such file: {}", path.display());
            return ExitCode::from(2);
        }
    }
    if let Some(path) = cli.command.output_path() {
        let dir = match path.parent() {
            Some(parent) if !parent.as_os_str().is_empty() => parent,
            _ => Path::new("."),
        };
        if !dir.is_dir() {
            eprintln!("jacobi: output directory does not exist: {}", dir.display());
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("jacobi: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), String> {
    match command {
        Command::Spectrum { input, output } => {
            let op = load_matrix(&input)?;
            let ed = eigendecompose(&op).map_err(|e| e.to_string())?;
            write_text(&output, &(ed.to_dump_json() + "\n"))
        }
        Command::Measure { input, site, output } => {
            let op = load_matrix(&input)?;
            let ed = eigendecompose(&op).map_err(|e| e.to_string())?;
            let mu = site_measure(&ed, BasisIndex(site)).map_err(|e| e.to_string())?;
            let mut buf = Vec::new();
            mu.write_csv(&mut buf).map_err(|e| e.to_string())?;
            write_bytes(&output, &buf)
        }
        Command::Relation { input, site, output } => {
            let op = load_matrix(&input)?;
            let ed = eigendecompose(&op).map_err(|e| e.to_string())?;
            let sites: Vec<i64> = match site {
                Some(site) => vec![site],
                None => op.interval().sites().collect(),
            };
            let mut rows = Vec::with_capacity(sites.len());
            let (mut max_s, mut max_c) = (0.0f64, 0.0f64);
            for site in sites {
                let resid =
                    check_semiinfinite_relation(&op, &ed, site).map_err(|e| e.to_string())?;
                max_s = max_s.max(resid.s_form);
                max_c = max_c.max(resid.c_form);
                rows.push(serde_json::json!({
                    "site": site,
                    "s_form": resid.s_form,
                    "c_form": resid.c_form,
                }));
            }
            let doc = serde_json::json!({
                "per_site": rows,
                "max_s_form": max_s,
                "max_c_form": max_c,
            });
            write_text(&output, &(doc.to_string() + "\n"))
        }
        Command::Experiment { config, seed, trials, output } => {
            let mut config = load_config(&config)?;
            if let Some(seed) = seed {
                config.seed = Some(seed);
            }
            if let Some(trials) = trials {
                config.trials = Some(trials);
            }
            let report = experiment::run(&config).map_err(|e| e.to_string())?;
            write_text(&output, &(report.to_json_string() + "\n"))
        }
        Command::Counterexample { output } => {
            let report = experiment::run_counterexample(3).map_err(|e| e.to_string())?;
            let assertions = report.assertions.as_deref().unwrap_or_default();
            let mut table = String::new();
            let _ = writeln!(table, "{:<26} {:>22} {:>22}  pass", "assertion", "expected", "actual");
            for record in assertions {
                let _ = writeln!(
                    table,
                    "{:<26} {:>22} {:>22}  {}",
                    record.name,
                    format!("{:?}", record.expected),
                    format!("{:?}", record.actual),
                    if record.pass { "yes" } else { "NO" }
                );
            }
            print!("{table}");
            if let Some(output) = output {
                write_text(&output, &(report.to_json_string() + "\n"))?;
            }
            if assertions.iter().all(|a| a.pass) {
                Ok(())
            } else {
                Err("counterexample assertions failed".into())
            }
        }
        Command::Carleman { config, output } => {
            let config = load_config(&config)?;
            if config.kind != ExperimentKind::Carleman {
                return Err("carleman verb requires a config with \"kind\": \"carleman\"".into());
            }
            let report = experiment::run(&config).map_err(|e| e.to_string())?;
            write_text(&output, &(report.to_json_string() + "\n"))
        }
    }
}

fn load_matrix(path: &Path) -> Result<JacobiOperator, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("reading {}: {e}", path.display()))?;
    JacobiOperator::from_json_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_config(path: &Path) -> Result<ExperimentConfig, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("reading {}: {e}", path.display()))?;
    ExperimentConfig::from_json_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_text(path: &Path, content: &str) -> Result<(), String> {
    fs::write(path, content).map_err(|e| format!("writing {}: {e}", path.display()))
}

fn write_bytes(path: &Path, content: &[u8]) -> Result<(), String> {
    fs::write(path, content).map_err(|e| format!("writing {}: {e}", path.display()))
}
