mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dmfbm_core::{Error, ErrorCategory};

use config::{Params, RunConfig};

/// Drift estimation in the double mixed fractional Brownian model.
#[derive(Parser)]
#[command(name = "dmfbm", version, about)]
struct Cli {
    /// JSON file with default parameters; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate K(u, s) and L(u, s) on an R×R mesh.
    KernelSurface(Params),
    /// Solve the Fredholm equation for h_T.
    Solve(Params),
    /// Manufactured-solution check with h(u) = u.
    Validate(Params),
    /// Simulate one path of the mixed model.
    Simulate(Params),
    /// Monte Carlo study of the estimator for one or more horizons.
    Montecarlo(Params),
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        ErrorCategory::Domain => 3,
        ErrorCategory::Numerical => 4,
        ErrorCategory::Io => 5,
    }
}

fn run(cli: Cli) -> dmfbm_core::Result<()> {
    let (name, params) = match cli.command {
        Command::KernelSurface(p) => ("kernel-surface", p),
        Command::Solve(p) => ("solve", p),
        Command::Validate(p) => ("validate", p),
        Command::Simulate(p) => ("simulate", p),
        Command::Montecarlo(p) => ("montecarlo", p),
    };
    let cfg = RunConfig::resolve(name, params, cli.config.as_deref())?;
    if let Some(n) = cfg.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    match name {
        "kernel-surface" => commands::kernel_surface(&cfg),
        "solve" => commands::solve(&cfg),
        "validate" => commands::validate(&cfg),
        "simulate" => commands::simulate(&cfg),
        _ => commands::montecarlo(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dmfbm: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
