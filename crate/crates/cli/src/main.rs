//! `resint`: resonance interaction energy between two two-level atoms.
//!
//! Every run takes a TOML configuration (`--config`) naming the mode, the
//! geometry, the dipoles, and the state, and prints a `key = value` summary
//! plus a CSV table. Exit codes: 0 success, 1 I/O failure, 2 invalid
//! configuration, 3 oracle non-convergence.

mod config;
mod modes;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use config::{AppError, Mode};
use modes::Flags;

#[derive(Parser)]
#[command(name = "resint", version, about = "Two-atom resonance interaction energy")]
struct Cli {
    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the CSV table here instead of standard output
    /// (overrides output_path from the configuration)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweep and scan rows (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Also report the energy scaled by 4 pi r^3 / |d_A| |d_B|
    #[arg(long, global = true)]
    dimensionless: bool,

    /// Append l1 and concurrence columns to sweep and scan tables
    #[arg(long, global = true)]
    coherence: bool,

    #[command(subcommand)]
    mode: ModeCmd,
}

#[derive(Subcommand)]
enum ModeCmd {
    /// Steady and oscillating interaction energy at one separation
    Energy,
    /// Field-correlation tensor entries at one separation
    Tensor,
    /// Classicality, l1 coherence, and concurrence of the state
    Coherence,
    /// Energy table over a range of separations
    Sweep,
    /// Energy table over a grid of states at fixed separation
    Scan,
    /// Closed form against the spectral-integral oracle
    OracleCheck,
    /// Power-law exponent of |energy| over a separation range
    SlopeFit,
}

impl ModeCmd {
    fn mode(&self) -> Mode {
        match self {
            ModeCmd::Energy => Mode::Energy,
            ModeCmd::Tensor => Mode::Tensor,
            ModeCmd::Coherence => Mode::Coherence,
            ModeCmd::Sweep => Mode::Sweep,
            ModeCmd::Scan => Mode::Scan,
            ModeCmd::OracleCheck => Mode::OracleCheck,
            ModeCmd::SlopeFit => Mode::SlopeFit,
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    if let Some(workers) = cli.workers {
        if workers == 0 {
            return Err(AppError::config("--workers must be at least 1"));
        }
        // build_global fails only if a pool already exists (e.g. in tests);
        // the pool never changes row order, so that is harmless
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .ok();
    }

    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| AppError::config("--config <path> is required"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::io(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = config::parse_config(&text)?;

    let mode = cli.mode.mode();
    if let Some(configured) = cfg.mode {
        if configured != mode {
            return Err(AppError::config(format!(
                "configuration sets mode {} but the {} subcommand was invoked",
                configured.name(),
                mode.name()
            )));
        }
    }
    if cli.out.is_some() {
        cfg.output_path = cli.out.clone();
    }

    let flags = Flags {
        dimensionless: cli.dimensionless,
        coherence: cli.coherence,
    };
    modes::run(mode, &cfg, &flags)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
