use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use config::{parse_config, parse_format, RunConfig};
use error::{CliError, CliResult};

/// Analysis tools for latent-symmetric non-Hermitian trimers: spectra,
/// dark/bright sectors, PT phases, exceptional points, and time evolution.
#[derive(Parser)]
#[command(name = "latsym", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues, sector decomposition, and phase classification (JSON)
    Spectrum(RunArgs),
    /// Time-evolution trajectory with local occupations (CSV or JSON)
    Evolve(RunArgs),
    /// Gamma sweep with located exceptional points (CSV + JSON sidecar)
    Sweep(RunArgs),
    /// Cospectrality verdicts and singlet sites for a network (JSON)
    Cospectral(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output path; overrides the config's "output" (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format override: csv or json
    #[arg(long)]
    format: Option<String>,
    /// Tolerance override for verdicts and classifications
    #[arg(long)]
    tol: Option<f64>,
}

fn load(args: &RunArgs, command_name: &str) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        CliError::config(
            "config",
            format!("cannot read {}: {e}", args.config.display()),
        )
    })?;
    let mut cfg = parse_config(&text, command_name)?;
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    if let Some(fmt) = &args.format {
        cfg.format = Some(parse_format(fmt, "--format")?);
    }
    if let Some(tol) = args.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::config(
                "--tol",
                "must be a positive finite number",
            ));
        }
        cfg.tol = tol;
    }
    Ok(cfg)
}

fn run() -> CliResult<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Spectrum(args) => commands::cmd_spectrum(&load(args, "spectrum")?),
        Command::Evolve(args) => commands::cmd_evolve(&load(args, "evolve")?),
        Command::Sweep(args) => commands::cmd_sweep(&load(args, "sweep")?),
        Command::Cospectral(args) => commands::cmd_cospectral(&load(args, "cospectral")?),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
