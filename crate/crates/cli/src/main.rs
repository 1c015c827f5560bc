//! `testrig`: command-line front end for the end-effector test rig toolkit.
//!
//! Exit status: 0 success, 1 configuration error, 2 numerical failure,
//! 3 scenario failure. Errors are printed to stderr as `code=<n> msg=<text>`.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use testrig_core::ErrorClass;

use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "testrig",
    version,
    about = "Structural, motion and grasp analysis for a 3-axis end-effector test rig"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Rig configuration (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, or `-` for stdout.
    #[arg(long, global = true, default_value = "-")]
    out: String,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "kv")]
    format: Format,
    /// Seed for every noise source.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form fixed-fixed rod analysis.
    Statics,
    /// Natural frequencies of the clamped rod (modal.csv).
    Modal {
        /// Number of modes to report.
        #[arg(long)]
        modes: Option<usize>,
        /// Number of beam elements.
        #[arg(long)]
        elements: Option<usize>,
        /// Report planar modes once instead of once per bending plane.
        #[arg(long)]
        no_expand: bool,
    },
    /// Damped frequency sweep of the clamped rod (harmonic.csv).
    Harmonic {
        /// Number of beam elements.
        #[arg(long)]
        elements: Option<usize>,
    },
    /// Home the gantry and move to a target (trace.csv).
    Move {
        /// Target position `x,y,z` in metres.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        to: Option<Vec<f64>>,
    },
    /// Closed-loop grasp-force simulation (trace.csv).
    Grasp,
    /// Test-matrix metrics for the configured scenario.
    Testmatrix,
    /// Conveyor pick-and-place run (report, trace.csv, events.log).
    Pickplace {
        /// Log every ping and move, not only milestones.
        #[arg(long)]
        verbose: bool,
    },
    /// Reproduce the reference statics and modal values.
    PaperCheck,
    /// Print the effective configuration (config.toml).
    Config,
}

pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl From<testrig_core::Error> for CliError {
    fn from(e: testrig_core::Error) -> Self {
        let code = match e.class() {
            ErrorClass::Config => 1,
            ErrorClass::Numerical => 2,
            ErrorClass::Scenario => 3,
        };
        CliError {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: 1,
            msg: format!("output: {e}"),
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprintln!("code=1 msg={}", one_line(&e.to_string()));
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match commands::run(&cli.global, &cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("code={} msg={}", e.code, one_line(&e.msg));
            ExitCode::from(e.code)
        }
    }
}
