//! `bitext`: harvest comparable documents, mine parallel sentences, expand
//! them by analogy, filter by domain and evaluate.

mod artifacts;
mod config;
mod error;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};

use config::{Overrides, PipelineConfig};

#[derive(Debug, Parser)]
#[command(name = "bitext", version, about = "Parallel sentence mining from comparable corpora")]
struct Cli {
    /// TOML configuration file; its relative paths are read against its
    /// directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `workers`.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Overrides `output`.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// More log output; repeat for debug messages.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Pair documents of two dumps, or load a paired directory.
    Harvest,
    /// Train the sentence-pair classifier on the seed corpus.
    TrainClassifier,
    /// Align the harvested documents and keep confident sentence pairs.
    Mine,
    /// Build rewriting models from seed analogies and apply them.
    Analogy,
    /// Keep the most in-domain candidate pairs.
    Filter,
    /// Score a lexicon baseline on a segmented test split.
    Eval,
    /// Run every stage in order.
    Pipeline,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let overrides = Overrides {
        seed: cli.seed,
        workers: cli.workers,
        output: cli.output.clone(),
    };
    let result = PipelineConfig::load(cli.config.as_deref(), &overrides).and_then(|config| match cli.command {
        Command::Harvest => stages::harvest(&config),
        Command::TrainClassifier => stages::train(&config),
        Command::Mine => stages::mine(&config),
        Command::Analogy => stages::analogy(&config),
        Command::Filter => stages::filter(&config),
        Command::Eval => stages::eval(&config),
        Command::Pipeline => stages::pipeline(&config),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
