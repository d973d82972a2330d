//! `ucpest`: size, train, estimate, benchmark, synth and describe.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 internal failure.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Format, GlobalFlags, Resolved};

#[derive(Debug, Parser)]
#[command(name = "ucpest", version, about = "Use Case Points effort estimation")]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice (default 20571).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML weight table with `technical` (13) and `environmental` (8) lists.
    #[arg(long, global = true)]
    weights: Option<PathBuf>,
    /// Output file, or directory for benchmark reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the adjusted size and the fixed-ratio effort estimates.
    Size(commands::SizeArgs),
    /// Train the hybrid model and write its artifact to --out.
    Train(commands::TrainArgs),
    /// Estimate effort for one project with a trained model.
    Estimate(commands::EstimateArgs),
    /// Leave-one-out comparison of the hybrid model and the baselines.
    Benchmark(commands::BenchmarkArgs),
    /// Generate a synthetic dataset.
    Synth(commands::SynthArgs),
    /// Moment summary of a dataset.
    Describe(commands::DescribeArgs),
}

/// Bad flags or inputs detected by the command layer.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn core_code(e: &ucp_hybrid::Error) -> u8 {
    use ucp_hybrid::Error;
    match e {
        Error::Stage { source, .. } | Error::Fold { source, .. } => core_code(source),
        Error::NotTrained => 2,
        _ => 1,
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        1
    } else if let Some(e) = err.downcast_ref::<ucp_hybrid::Error>() {
        core_code(e)
    } else {
        2
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let flags = GlobalFlags {
        config: cli.config,
        seed: cli.seed,
        weights: cli.weights,
        out: cli.out,
        format: cli.format,
    };
    let name = match &cli.command {
        Command::Size(_) => "size",
        Command::Train(_) => "train",
        Command::Estimate(_) => "estimate",
        Command::Benchmark(_) => "benchmark",
        Command::Synth(_) => "synth",
        Command::Describe(_) => "describe",
    };
    let mut resolved = Resolved::new(name, &flags)?;
    match cli.command {
        Command::Size(a) => commands::size(a, &resolved),
        Command::Train(a) => commands::train(a, &mut resolved),
        Command::Estimate(a) => commands::estimate(a, &resolved),
        Command::Benchmark(a) => commands::benchmark(a, &mut resolved),
        Command::Synth(a) => commands::synth(a, &mut resolved),
        Command::Describe(a) => commands::describe_cmd(a, &resolved),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
        Err(_) => ExitCode::from(2),
    }
}
