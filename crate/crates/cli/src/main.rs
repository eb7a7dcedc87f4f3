//! `proxyfaug`: augment fingerprint training sets and measure the
//! positioning effect.

mod commands;
mod config;
mod error;

use clap::{Parser, Subcommand};

use crate::config::{EstimatorArg, RunConfig, RunFlags, Split};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "proxyfaug", version, about)]
struct Cli {
    #[command(flatten)]
    flags: RunFlags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Augment the training set and write the augmented CSV with a manifest
    Augment,
    /// Fit on the training set and report errors on a query split
    Evaluate {
        /// Query split (defaults to test when given, else validation)
        #[arg(long, value_enum)]
        split: Option<Split>,
        /// Neighbor aggregation rule
        #[arg(long, value_enum)]
        estimator: Option<EstimatorArg>,
    },
    /// Sweep k on the validation split
    Tune {
        /// k values, e.g. `1..15` or `1,3,6`
        #[arg(long)]
        ks: Option<String>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = RunConfig::resolve(&cli.flags)?;
    if config.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build_global()
            .map_err(|e| CliError::Internal(format!("cannot start thread pool: {e}")))?;
    }
    match cli.command {
        Command::Augment => commands::cmd_augment(&config),
        Command::Evaluate { split, estimator } => commands::cmd_evaluate(&config, split, estimator),
        Command::Tune { ks } => commands::cmd_tune(&config, ks.as_deref()),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("proxyfaug: {e}");
        std::process::exit(e.exit_code());
    }
}
