//! Experiment driver for the monotone-pattern tester: instance
//! generation, Monte Carlo success-rate and query-scaling runs,
//! adversary scoring against the hard distribution, profile-bound
//! sweeps, and oracle cross-validation.
//!
//! Exit codes: 0 success, 1 acceptance failure, 2 invalid input.

mod experiments;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use experiments::*;

#[derive(Parser)]
#[command(
    name = "monoseq",
    version,
    about = "Monotone-pattern tester experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance as one integer per line.
    Generate(CommonArgs),
    /// Monte Carlo success-rate experiment (one row per trial).
    Test(CommonArgs),
    /// Median query count across a list of n; fits the polylog exponent.
    Scale(CommonArgs),
    /// Score query sets against the hard-instance distribution.
    Adversary(CommonArgs),
    /// Profile-count bound sweep over random query sets.
    Profiles(CommonArgs),
    /// Cross-validate the exact oracles and structural verifiers.
    ValidateOracles(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(a) => run_generate(&a),
        Command::Test(a) => run_success_rate(&a),
        Command::Scale(a) => run_query_scaling(&a),
        Command::Adversary(a) => run_adversary_score(&a),
        Command::Profiles(a) => run_profile_bound(&a),
        Command::ValidateOracles(a) => run_validate_oracles(&a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
