use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tracelab_cli::commands::{self, Context};
use tracelab_cli::{CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "tracelab", version, about = "Traces of inhomogeneous Besov functions at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config; every field has a default.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Keep fields as on-demand sources instead of dense arrays.
    #[arg(long, global = true)]
    implicit: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Scaling functions and Legendre spectra of the configured capacities.
    Tau,
    /// Property (R) report and offset schedule for the configured wavelet.
    CheckWavelet,
    /// Build a coefficient field and its seminorm profile.
    Synthesize,
    /// Trace coefficients at heights drawn from the auxiliary measures.
    Trace,
    /// Pointwise leader exponents of stored traces.
    Leaders,
    /// Leader spectra of stored traces.
    Spectrum,
    /// Run the experiment named in the config and test its claim.
    Experiment,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::from_path(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let ctx = Context { out, implicit: cli.implicit };
    match cli.command {
        Command::Tau => commands::cmd_tau(&cfg, &ctx),
        Command::CheckWavelet => commands::cmd_check_wavelet(&cfg, &ctx),
        Command::Synthesize => commands::cmd_synthesize(&cfg, &ctx),
        Command::Trace => commands::cmd_trace(&cfg, &ctx),
        Command::Leaders => commands::cmd_leaders(&cfg, &ctx),
        Command::Spectrum => commands::cmd_spectrum(&cfg, &ctx),
        Command::Experiment => commands::cmd_experiment(&cfg, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tracelab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
