//! Command-line front end.
//!
//! Exit codes: 0 success, 1 file system failure, 2 invalid request,
//! 3 integration accuracy loss, 4 usage error.

pub mod config;
pub mod figures;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::metrics::{drive_metrics, mode_comparison_ratio, ratio_surface, MIN_QUAD_POINTS};
use crate::protocols::design;
use config::{RunArgs, RunConfig};
use output::{
    design_json, metrics_json, pulses_table, summary_json, trajectory_table, write_file, write_json,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Accuracy(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Accuracy(_) => 3,
            CliError::Usage(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::IntegrationAccuracy { .. } => CliError::Accuracy(e.to_string()),
            Error::UnknownPreset(_) => CliError::Usage(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cdqse",
    version,
    about = "Counterdiabatic pulse design and simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Design pulses: pulses.csv and design.json
    Design(RunArgs),
    /// Design and integrate: trajectory.csv and summary.json
    Evolve(RunArgs),
    /// Single-mode over multi-mode cost surface: ratio_surface.csv
    Sweep(RunArgs),
    /// Time-averaged frequency and energy of a design: metrics.json
    Metrics(RunArgs),
    /// Data set behind one figure, 1 to 13
    Figures {
        figure: u32,
        #[command(flatten)]
        args: RunArgs,
    },
}

fn report(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn run_design(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let request = cfg.request()?;
    let d = design(&request)?;
    let mut files = Vec::new();
    if cfg.formats.csv {
        files.push(write_file(
            &cfg.out,
            "pulses.csv",
            &pulses_table(&d, cfg.steps + 1).to_csv(),
        )?);
    }
    if cfg.formats.json {
        files.push(write_json(
            &cfg.out,
            "design.json",
            &design_json(&d, &request.target),
        )?);
    }
    Ok(files)
}

fn run_evolve(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let request = cfg.request()?;
    let d = design(&request)?;
    let traj = d.evolve(cfg.steps)?;
    let mut files = Vec::new();
    if cfg.formats.csv {
        files.push(write_file(
            &cfg.out,
            "trajectory.csv",
            &trajectory_table(&d, &traj)?.to_csv(),
        )?);
    }
    if cfg.formats.json {
        files.push(write_json(
            &cfg.out,
            "summary.json",
            &summary_json(&d, &request.target, &traj),
        )?);
    }
    Ok(files)
}

pub(crate) fn run_sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let surface = ratio_surface(cfg.resolution)?;
    let mut files = Vec::new();
    if cfg.formats.csv {
        files.push(write_file(
            &cfg.out,
            "ratio_surface.csv",
            &surface.to_csv(),
        )?);
    }
    if cfg.formats.json {
        let json = serde_json::to_value(&surface).expect("surface serializes");
        files.push(write_json(&cfg.out, "ratio_surface.json", &json)?);
    }
    Ok(files)
}

fn run_metrics(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let request = cfg.request()?;
    let d = design(&request)?;
    let m = drive_metrics(&d.pulses, d.t0, d.tf, MIN_QUAD_POINTS);
    let mut value = metrics_json(&m);
    let t = request.target;
    if !t.has_phases() && t.mu >= 0.0 && t.eta >= 0.0 && t.nu >= 0.0 {
        let r = mode_comparison_ratio(t.mu, t.eta, t.nu)?;
        value["mode_ratio"] =
            serde_json::json!({ "omega_ratio": r.omega_ratio, "energy_ratio": r.energy_ratio });
    }
    println!(
        "{}",
        serde_json::to_string(&value).expect("JSON values serialize")
    );
    if cfg.formats.json {
        return Ok(vec![write_json(&cfg.out, "metrics.json", &value)?]);
    }
    Ok(Vec::new())
}

pub fn execute(command: &Command) -> Result<Vec<PathBuf>, CliError> {
    match command {
        Command::Design(a) => run_design(&RunConfig::from_args(a)?),
        Command::Evolve(a) => run_evolve(&RunConfig::from_args(a)?),
        Command::Sweep(a) => run_sweep(&RunConfig::from_args(a)?),
        Command::Metrics(a) => run_metrics(&RunConfig::from_args(a)?),
        Command::Figures { figure, args } => {
            figures::run_figure(*figure, &RunConfig::from_args(args)?)
        }
    }
}

/// Parses `args` (program name first), runs the command, and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(files) => {
            report(&files);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
