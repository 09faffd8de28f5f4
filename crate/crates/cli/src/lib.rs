//! Experiment runner for rank-drift particle systems.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use commands::{bounds, finite, infinite, rbm, tagged, Outcome};
use config::Config;
use error::{CliError, Exit};
use output::Output;

pub const THREADS_ENV: &str = "ATLAS_SIM_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "atlas-sim",
    version,
    about = "Monte Carlo checks for rank-drift particle systems"
)]
pub struct Cli {
    /// TOML configuration file; omitted sections use their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `output_dir`; artifacts go to `<dir>/<command>/`.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Overrides the master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stationary spacing law of a finite rank-drift system.
    StationaryFinite {
        /// Probe spacing growth instead of failing on a non-tight drift vector.
        #[arg(long)]
        expect_divergence: bool,
    },
    /// Stationarity of the infinite Atlas model under its truncation plan.
    StationaryInfinite {
        /// Write plan.json and stop.
        #[arg(long)]
        emit_plan_only: bool,
    },
    /// Fluctuations of the tagged particle started from a Poisson field.
    Harris,
    /// Exploratory spread of the k-th particle of the infinite Atlas model.
    ConjectureK,
    /// Stationary law of reflected Brownian motion in a polyhedral cone.
    RbmCheck {
        /// Probe growth instead of failing on a non-ergodic drift.
        #[arg(long)]
        expect_divergence: bool,
    },
    /// Tabulates the truncation bounds over parameter grids.
    BoundsTable,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::StationaryFinite { .. } => finite::NAME,
            Command::StationaryInfinite { .. } => infinite::NAME,
            Command::Harris => tagged::HARRIS,
            Command::ConjectureK => tagged::CONJECTURE,
            Command::RbmCheck { .. } => rbm::NAME,
            Command::BoundsTable => bounds::NAME,
        }
    }
}

/// Reads the thread cap from the environment; unset means the default pool.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

/// Runs a parsed command and returns the outcome.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    let threads = thread_cap()?;
    let out = Output::create(&cfg.output_dir.join(cli.command.name()))?;
    let seed = cfg.seed;
    atlas_core::rng::with_threads(threads, || match &cli.command {
        Command::StationaryFinite { expect_divergence } => {
            finite::run(&cfg.stationary_finite, seed, &out, *expect_divergence)
        }
        Command::StationaryInfinite { emit_plan_only } => {
            infinite::run(&cfg.stationary_infinite, seed, &out, *emit_plan_only)
        }
        Command::Harris => tagged::harris(&cfg.harris, seed, &out),
        Command::ConjectureK => tagged::conjecture(&cfg.conjecture_k, seed, &out),
        Command::RbmCheck { expect_divergence } => {
            rbm::run(&cfg.rbm_check, seed, &out, *expect_divergence)
        }
        Command::BoundsTable => bounds::run(&cfg.bounds_table, seed, &out),
    })
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                Exit::Config as i32
            } else {
                Exit::Pass as i32
            };
        }
    };
    match execute(&cli) {
        Ok(o) => {
            let status = if o.pass { "PASS" } else { "FAIL" };
            println!("{} {status}: {}", cli.command.name(), o.summary);
            if o.pass {
                Exit::Pass as i32
            } else {
                Exit::GateFailed as i32
            }
        }
        Err(e) => {
            eprintln!("{}: {e}", cli.command.name());
            e.exit() as i32
        }
    }
}
