//! Command-line front end.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{plot_script, trajectory_csv, CSV_HEADER};
pub use config::{default_scheduling_problem, parse_config, SimConfig};

use crate::error::Error;
use crate::integrator::RateGroups;

#[derive(Debug, Parser)]
#[command(
    name = "railsim",
    version,
    about = "Multi-rate rail vehicle simulation and cyclic schedule tools"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON configuration file; defaults apply when omitted.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Simulated horizon in seconds (wall-clock length for realtime runs).
    #[arg(long, value_name = "S")]
    pub duration: Option<f64>,
    /// Rate divisors of carriage, trolley 1 and trolley 2.
    #[arg(long, value_name = "A,B,C", value_parser = parse_divisors)]
    pub divisors: Option<RateGroups>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the model; writes trajectory.csv and plot.gp.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Compare the multi-rate run against a uniform-rate reference.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Allowed deviation as a fraction of each coordinate's peak.
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
    },
    /// Optimize the task-to-core assignment; writes solution.json.
    Schedule {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "abc")]
        solver: String,
    },
    /// Print the undamped natural frequencies.
    Eigen {
        #[command(flatten)]
        common: Common,
    },
    /// Measure execution times of the group task bodies.
    Measure {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000)]
        iterations: u64,
        #[arg(long, default_value_t = 1_000)]
        warmup: u64,
    },
    /// Solve the schedule and run the integration under its table.
    Execute {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "logical")]
        executor: String,
        #[arg(long, default_value = "abc")]
        solver: String,
    },
}

fn parse_divisors(text: &str) -> Result<RateGroups, String> {
    let parts: Vec<u32> = text
        .split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    let arr: [u32; 3] = parts
        .try_into()
        .map_err(|v: Vec<u32>| format!("expected 3 comma-separated divisors, got {}", v.len()))?;
    RateGroups::new(arr).map_err(|e| e.to_string())
}

/// Exit status for a failed command: 2 for bad input or I/O, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_input_error() {
        2
    } else {
        1
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!(
                "{}",
                if first.starts_with("error:") {
                    first.to_string()
                } else {
                    format!("error: {first}")
                }
            );
            return 2;
        }
    };
    match commands::dispatch(cli.command) {
        Ok(commands::Status::Success) => 0,
        Ok(commands::Status::Failure(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            exit_code(&e)
        }
    }
}
