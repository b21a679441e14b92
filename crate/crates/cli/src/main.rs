//! `stickslip`: certification and simulation front end.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use commands::{CommandError, Which};
use config::RunConfig;

/// Environment variable capping the worker threads used by `sweep`.
const THREADS_VAR: &str = "STICKSLIP_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Ends of the unstable reference-speed interval.
    Roots,
    /// Attractor, basin or global-stability certificate at `v_ref`.
    Certify,
    /// Time-domain simulation with limit-cycle detection.
    Simulate,
    /// Regime classification over a grid of speeds.
    Sweep,
}

#[derive(Debug, Parser)]
#[command(name = "stickslip", version, about = "Stick-slip certification and simulation")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured reference speed (m/s).
    #[arg(long)]
    vref: Option<f64>,
    /// Certificate family for `certify`.
    #[arg(long, value_enum)]
    which: Option<Which>,
    /// Output directory (overrides the configured one).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), CommandError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CommandError::Usage(format!("{THREADS_VAR} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CommandError::Usage(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CommandError> {
    configure_threads()?;
    let mut cfg = RunConfig::load(&cli.config).map_err(|e| CommandError::Usage(e.to_string()))?;
    if let Some(v) = cli.vref {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CommandError::Usage(format!("--vref {v} must be strictly positive")));
        }
        cfg.v_ref = v;
    }
    if let Some(out) = cli.out {
        cfg.output_dir = out;
    }
    match cli.command {
        Command::Roots => commands::roots(&cfg),
        Command::Certify => {
            let which = cli
                .which
                .ok_or_else(|| CommandError::Usage("certify needs --which attractor|basin|gas".into()))?;
            commands::certify(&cfg, which)
        }
        Command::Simulate => commands::simulate_cmd(&cfg),
        Command::Sweep => commands::sweep(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
