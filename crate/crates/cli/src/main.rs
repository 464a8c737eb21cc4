//! `robtrend`: generate synthetic series, filter CSV data, filter streams,
//! and run the benchmark grid.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod args;
mod commands;
mod config;
mod error;
mod io;
mod manifest;

use config::Config;
use error::CliResult;

/// Environment variable that caps the number of benchmark worker threads.
pub const WORKERS_ENV: &str = "ROBTREND_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "robtrend", version, about = "Robust trend filtering")]
struct Cli {
    /// Flat `key = value` file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic benchmark series as CSV.
    Generate(commands::generate::GenerateArgs),
    /// Filter a CSV series with one method.
    Filter(commands::filter::FilterArgs),
    /// Filter numbers read line by line from standard input.
    Stream(commands::stream::StreamArgs),
    /// Score a filtered series against the truth of a generated one.
    Score(commands::score::ScoreArgs),
    /// Run the method x outlier-ratio x seed benchmark grid.
    Bench(commands::bench::BenchArgs),
    /// Grid-search hyperparameters on the tuning seed.
    Tune(commands::tune::TuneArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Generate(a) => commands::generate::run(&a, &cfg),
        Command::Filter(a) => commands::filter::run(&a, &cfg),
        Command::Stream(a) => commands::stream::run(&a, &cfg),
        Command::Score(a) => commands::score::run(&a),
        Command::Bench(a) => commands::bench::run(&a, &cfg),
        Command::Tune(a) => commands::tune::run(&a, &cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
