//! Command-line entry point.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::curves::BoundsConfig;
use crate::error::{HarnessError, Result};
use crate::output::{curve_csv, sanitize, write_atomic};
use crate::runner::{run_experiment, RunOptions};
use crate::summary::log_checkpoints;
use crate::svg::render_chart;
use crate::sweep::{run_sweep, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "cbm", version, about = "Simulate learners that pay for reward feedback under a budget")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct IoArgs {
    /// JSON config file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment.
    Run {
        #[command(flatten)]
        io: IoArgs,
        /// Worker threads for replications.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the cartesian product of the values listed under "sweep".
    Sweep {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write reference bound curves.
    Bounds {
        #[command(flatten)]
        io: IoArgs,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

/// Writes `bound_<label>.csv` for every curve, and `bounds.svg` if asked.
pub fn write_bounds(config: &BoundsConfig, out: &Path) -> Result<()> {
    let ts = log_checkpoints(config.horizon);
    let curves = config.curves.iter().map(|c| c.evaluate(&ts)).collect::<Result<Vec<_>>>()?;
    for curve in &curves {
        write_atomic(&out.join(format!("bound_{}.csv", sanitize(&curve.label))), curve_csv(curve).as_bytes())?;
    }
    if config.svg {
        write_atomic(&out.join("bounds.svg"), render_chart("reference bounds", None, &curves).as_bytes())?;
    }
    Ok(())
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Run { io, threads } => {
            let config = ExperimentConfig::from_json(&read(&io.config)?)?;
            let options = RunOptions { threads: *threads, keep_traces: false };
            run_experiment(&config, Some(&io.out), &options).map(|_| ())
        }
        Command::Sweep { io, threads } => {
            let sweep = SweepConfig::from_json(&read(&io.config)?)?;
            run_sweep(&sweep, &io.out, &RunOptions { threads: *threads, keep_traces: false })
        }
        Command::Bounds { io } => write_bounds(&BoundsConfig::from_json(&read(&io.config)?)?, &io.out),
    }
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
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
