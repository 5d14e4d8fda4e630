//! Command-line surface: train weights, plan trajectories, run benchmark
//! suites, and sweep the restricted value-function analysis.
//!
//! Exit codes: 0 on success, 2 for config errors, 3 for numeric failures.

mod commands;
mod csvout;
mod pool;

use clap::{Args, Parser, Subcommand};
use pearl::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pearl", version, about = "Preference-balancing motion planning toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train feature weights on the task's reduced domain and keep the
    /// fittest of the Monte-Carlo repeats.
    Train(TrainArgs),
    /// Plan closed-loop trajectories and write them as CSV.
    Plan(PlanArgs),
    /// Timing and scaling suites.
    Bench(BenchArgs),
    /// Sweep the restricted value function for extrema.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output weights file (TOML).
    #[arg(long)]
    out: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of Monte-Carlo training repeats.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    config: PathBuf,
    /// Weights file; defaults to the task's published weights.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Output directory for trajectory CSVs and the summary.
    #[arg(long)]
    out: PathBuf,
    /// Controller: das | lsapa | hoot-grid | boids | apf.
    #[arg(long)]
    policy: Option<String>,
    /// Number of trials (initial conditions).
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Horizon in seconds; overrides the config.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// TOML file with explicit initial conditions ([[state]] coords = [..]).
    #[arg(long)]
    initial_conditions: Option<PathBuf>,
    /// Relative attractive/repulsive strength for the apf baseline.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
}

#[derive(Args)]
struct BenchArgs {
    /// pursuit-scaling | policy-timing | feature-scaling
    #[arg(long)]
    suite: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Weight-ratio sweep as lo:hi:count.
    #[arg(long, default_value = "60:250:20")]
    c_range: String,
    /// Obstacle half-separation sweep as lo:hi:count.
    #[arg(long, default_value = "0.1:1.5:20")]
    d_range: String,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => commands::train(args),
        Command::Plan(args) => commands::plan(args),
        Command::Bench(args) => commands::bench(args),
        Command::Analyze(args) => commands::analyze(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Config { .. }
                | Error::UnknownKind { .. }
                | Error::InvalidArgument { .. }
                | Error::Io(_) => 2,
                _ => 3,
            };
            ExitCode::from(code)
        }
    }
}
