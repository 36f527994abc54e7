mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::MetricName;

/// Tokenizer adaptation, instruction-collection building and evaluation.
#[derive(Parser)]
#[command(name = "langadapt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Each overrides the config key of the
/// same name.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON config file; unknown keys are an error.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Train a byte-level BPE tokenizer on one or more corpora.
    TokenizerTrain {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        vocab_size: Option<usize>,
    },
    /// Compare tokens per document and per word of two tokenizers.
    Fertility {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        adapted_model: Option<PathBuf>,
        #[arg(long)]
        baseline_model: Option<PathBuf>,
    },
    /// Initialize embeddings for a new vocabulary from an old table.
    Adapt {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        old_tokenizer: Option<PathBuf>,
        #[arg(long)]
        old_embeddings: Option<PathBuf>,
        #[arg(long)]
        new_tokenizer: Option<PathBuf>,
    },
    /// Render, upsample and phase task records into instruction data.
    BuildCollection {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        templates: Option<PathBuf>,
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Score predictions with one metric.
    Score {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        metric: Option<MetricName>,
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::TokenizerTrain { common, vocab_size } => commands::tokenizer_train(&common, vocab_size),
        Command::Fertility {
            common,
            adapted_model,
            baseline_model,
        } => commands::fertility(&common, adapted_model, baseline_model),
        Command::Adapt {
            common,
            old_tokenizer,
            old_embeddings,
            new_tokenizer,
        } => commands::adapt(&common, old_tokenizer, old_embeddings, new_tokenizer),
        Command::BuildCollection {
            common,
            templates,
            plan,
        } => commands::build_collection(&common, templates, plan),
        Command::Score {
            common,
            metric,
            predictions,
        } => commands::score(&common, metric, predictions),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
