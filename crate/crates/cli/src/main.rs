//! Command-line driver for two-regime change point estimation: fitting,
//! simulation, benchmarking, classification, and plot-table emission.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input or estimation
//! failure. Diagnostics go to standard error.

mod commands;
mod config;
mod report;

use clap::{Parser, Subcommand};

use commands::{benchmark, classify, fit, plotdata, simulate};

#[derive(Parser)]
#[command(
    name = "t2cd",
    version,
    about = "Estimate the change point between a nonlinear trend and a long-memory equilibrium"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a change point model to series read from CSV.
    Fit(fit::FitArgs),
    /// Generate synthetic replicate series from a scenario config.
    Simulate(simulate::SimulateArgs),
    /// Sweep scenario grids × methods and summarize errors and runtimes.
    Benchmark(benchmark::BenchmarkArgs),
    /// Leave-one-group-out discriminant evaluation of a feature table.
    Classify(classify::ClassifyArgs),
    /// Emit plain tables for plotting fits, residuals, and reports.
    Plotdata(plotdata::PlotdataArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fit(args) => fit::run(args),
        Command::Simulate(args) => simulate::run(args),
        Command::Benchmark(args) => benchmark::run(args),
        Command::Classify(args) => classify::run(args),
        Command::Plotdata(args) => plotdata::run(args),
    };
    match result {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(if e.is_io() { 1 } else { 2 });
        }
    }
}
