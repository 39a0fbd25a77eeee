use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Parser)]
#[command(
    name = "pbit-sim",
    version,
    about = "Virtual-time simulator for networks of stochastic p-bits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Scenario fields that can be overridden from the command line.
#[derive(Args, Debug, Clone)]
pub struct Overrides {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trace samples to collect.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Fraction of samples discarded before counting.
    #[arg(long)]
    pub burn_in: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Directory for output files; created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its histogram.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: Output,
        /// Also write every sample to trace.csv.
        #[arg(long)]
        trace: bool,
        /// Modes printed to stdout.
        #[arg(long, default_value_t = 8)]
        top: usize,
    },
    /// Oracle distance against sampling time.
    SweepTau {
        scenario: PathBuf,
        /// Sampling times in ms.
        #[arg(long, value_delimiter = ',', default_value = "1,100,200,400")]
        taus: Vec<f64>,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: Output,
    },
    /// Oracle distance against interaction strength I0.
    SweepI0 {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0,0.2,0.4,0.6,0.8,1")]
        values: Vec<f64>,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: Output,
    },
    /// Oracle distance for several retention-time plans.
    SweepRetention {
        scenario: PathBuf,
        /// JSON array of retention plans. Defaults to {200,200,200},
        /// {137,200,263} and {50,200,350} ms for three-p-bit networks.
        #[arg(long)]
        plans: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: Output,
    },
    /// Check a gate file's ground states against its truth table.
    Verify {
        gate: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        i0_check: f64,
    },
    /// Search for a gate Hamiltonian matching a truth table.
    Synth {
        request: PathBuf,
        /// Write the gate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize a histogram.csv written by `run`.
    Report {
        histogram: PathBuf,
        #[arg(long, default_value_t = 8)]
        top: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario,
            overrides,
            output,
            trace,
            top,
        } => commands::run(&scenario, &overrides, &output, trace, top),
        Command::SweepTau {
            scenario,
            taus,
            overrides,
            output,
        } => commands::sweep_tau(&scenario, &taus, &overrides, &output),
        Command::SweepI0 {
            scenario,
            values,
            overrides,
            output,
        } => commands::sweep_i0(&scenario, &values, &overrides, &output),
        Command::SweepRetention {
            scenario,
            plans,
            overrides,
            output,
        } => commands::sweep_retention(&scenario, plans.as_deref(), &overrides, &output),
        Command::Verify { gate, i0_check } => commands::verify(&gate, i0_check),
        Command::Synth { request, out } => commands::synth(&request, out.as_deref()),
        Command::Report {
            histogram,
            top,
            format,
        } => commands::report(&histogram, top, format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
