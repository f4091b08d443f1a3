//! `breakfit` — fits SDE models to price windows around report events and
//! reports before/after parameter breaks.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod config;
mod error;
mod run;

use error::EXIT_ARGS;

#[derive(Parser)]
#[command(
    name = "breakfit",
    version,
    about = "Fit SDE models around report events and quantify parameter breaks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form GBM MLE fit of one ticker's event window.
    FitGbm(FitArgs),
    /// Grid-search jump-CEV fit of one ticker's event window.
    FitCev(FitArgs),
    /// One report row per admissible event in the events file.
    BatchReport(BatchArgs),
    /// Emit a simulated path as timestamp,price CSV on standard output.
    Simulate(SimulateArgs),
}

#[derive(Args)]
pub struct FitArgs {
    /// Bars CSV for the ticker (header: timestamp,price).
    #[arg(long)]
    pub bars: PathBuf,
    /// Events CSV (header: ticker,report_time,session).
    #[arg(long)]
    pub events: PathBuf,
    /// Ticker symbol to fit; must appear in the events file.
    #[arg(long)]
    pub ticker: String,
    /// Flat key=value config file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Holiday list, one YYYY-MM-DD per line.
    #[arg(long)]
    pub holidays: Option<PathBuf>,
    /// Base seed for the frozen noise paths.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Objective for grid fits: mse, mape, or kl.
    #[arg(long)]
    pub objective: Option<String>,
    /// Bars on each side of the break (default 390 = one trading week).
    #[arg(long)]
    pub bars_per_side: Option<usize>,
    /// Directory for observed/fitted path files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Candidate counts and per-side diagnostics on standard error.
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Args)]
pub struct BatchArgs {
    /// Directory of per-ticker bars files named <ticker>.csv.
    #[arg(long)]
    pub bars_dir: PathBuf,
    /// Events CSV (header: ticker,report_time,session).
    #[arg(long)]
    pub events: PathBuf,
    /// Which model's table to build.
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Flat key=value config file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Holiday list, one YYYY-MM-DD per line.
    #[arg(long)]
    pub holidays: Option<PathBuf>,
    /// Base seed for the frozen noise paths.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Objective for grid fits: mse, mape, or kl.
    #[arg(long)]
    pub objective: Option<String>,
    /// Bars on each side of the break (default 390 = one trading week).
    #[arg(long)]
    pub bars_per_side: Option<usize>,
    /// Candidate counts and per-side diagnostics on standard error.
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Process to simulate.
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Per-bar drift.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    /// Per-bar volatility (scale).
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: f64,
    /// Elasticity exponent; required for cev.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Initial price.
    #[arg(long, allow_negative_numbers = true)]
    pub s0: f64,
    /// Number of simulated steps; output has n+1 bars.
    #[arg(long)]
    pub n_bars: usize,
    /// Noise seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Gbm,
    Cev,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_ARGS,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::FitGbm(args) => run::fit_gbm(args),
        Command::FitCev(args) => run::fit_cev(args),
        Command::BatchReport(args) => run::batch_report(args),
        Command::Simulate(args) => run::simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
