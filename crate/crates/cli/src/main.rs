mod commands;
mod plots;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use duopoly_core::Error;

/// Batch experiments for the two-company supply-chain and market game.
#[derive(Debug, Parser)]
#[command(name = "duopoly", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Experiment configuration (TOML). Without it the shipped default is used.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the seed of the command (the master seed for `gsa`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; defaults to `output_dir` from the configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run replications of the configured strategy pair.
    Simulate {
        /// Write a daily CSV trace per replication.
        #[arg(long)]
        trace: bool,
        /// Replications; defaults to `simulate.replications`.
        #[arg(short = 'n', long)]
        replications: Option<usize>,
    },
    /// Estimate payoff statistics of the configured strategy pair.
    Estimate {
        /// Replications; defaults to `gsa.sampling.initial_n`.
        #[arg(short = 'n', long)]
        replications: Option<usize>,
    },
    /// Find pure equilibria of a payoff matrix CSV.
    Solve {
        #[arg(long)]
        game: PathBuf,
        /// Treat the matrix as a general two-player game.
        #[arg(long)]
        asymmetric: bool,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
    },
    /// Run the iterative strategy refinement and write reports.
    Gsa {
        /// Tolerance band for stability; overrides `gsa.epsilon`.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Best-response steps; overrides `gsa.stability.steps`.
        #[arg(long)]
        steps: Option<usize>,
        /// Also write the simulated daily trace of each solution.
        #[arg(long)]
        trace: bool,
    },
    /// Stability ratios of a solution in a persisted payoff matrix.
    Stability {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        asymmetric: bool,
        /// Defaults to `gsa.epsilon`.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Defaults to `gsa.stability.steps`.
        #[arg(long)]
        steps: Option<usize>,
        /// Profile as `row,column` (0-based); defaults to the selected solution.
        #[arg(long)]
        solution: Option<String>,
    },
    /// Re-emit plot data and summary tables from a GSA output directory.
    Report {
        /// Directory holding `iteration_NN.json`; defaults to the output directory.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, cli.common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn run(command: Command, common: Common) -> Result<(), Error> {
    let ctx = commands::Context::new(&common)?;
    match command {
        Command::Simulate { trace, replications } => commands::simulate(&ctx, trace, replications),
        Command::Estimate { replications } => commands::estimate(&ctx, replications),
        Command::Solve {
            game,
            asymmetric,
            epsilon,
        } => commands::solve(&ctx, &game, !asymmetric, epsilon),
        Command::Gsa { epsilon, steps, trace } => commands::gsa(ctx, epsilon, steps, trace),
        Command::Stability {
            game,
            asymmetric,
            epsilon,
            steps,
            solution,
        } => commands::stability(&ctx, &game, !asymmetric, epsilon, steps, solution.as_deref()),
        Command::Report { dir } => commands::report(&ctx, dir),
    }
}
