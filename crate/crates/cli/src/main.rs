//! `boolrule`: summarize → select-features → suggest-thresholds → binarize →
//! train → evaluate → explain / cluster.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 provider error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use boolrule::Error;
use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "boolrule", version, about = "Learn and explain expressive Boolean classification rules")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for the train/holdout split and the optimizer.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Answer every provider request from recorded fixtures.
    #[arg(long, global = true)]
    offline: bool,
    /// Fixture directory for offline mode.
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Dataset CSV.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Target column name.
    #[arg(long, global = true)]
    target: Option<String>,
    /// Target value counted as the positive class.
    #[arg(long, global = true)]
    positive_label: Option<String>,
    /// Feature-selection result whose selected features form the allowlist.
    #[arg(long, global = true)]
    selection: Option<PathBuf>,
    /// Threshold recommendation merged over quantile defaults.
    #[arg(long, global = true)]
    thresholds: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-feature summary statistics.
    Summarize,
    /// Ask the provider which features to keep.
    SelectFeatures,
    /// Ask the provider for semantically meaningful thresholds.
    SuggestThresholds,
    /// Write the binarization spec (and optionally the 0/1 matrix).
    Binarize {
        /// Also write the binarized matrix as CSV.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Learn rules and write a model file.
    Train {
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
        /// Write the annealing trace of the first restart as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Score a model's rules or explicit rule text.
    Evaluate {
        #[arg(long)]
        model: Option<PathBuf>,
        /// Rule text; may be repeated.
        #[arg(long = "rule")]
        rules: Vec<String>,
        /// Score model rules on every row instead of the holdout.
        #[arg(long)]
        full: bool,
    },
    /// Grounded explanation of one instance.
    Explain {
        #[arg(long)]
        model: PathBuf,
        /// Row index into the dataset.
        #[arg(long, conflicts_with = "instance")]
        row: Option<usize>,
        /// Instance as `name=value` pairs separated by commas.
        #[arg(long)]
        instance: Option<String>,
    },
    /// Group rules into families.
    Cluster {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long = "rule")]
        rules: Vec<String>,
        #[arg(short, long, default_value_t = 3)]
        k: usize,
        /// Choose k in 2..=5 by silhouette instead of using -k.
        #[arg(long)]
        auto_k: bool,
        /// Embed descriptions with the provider instead of literal indicators.
        #[arg(long)]
        provider_embeddings: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Syntax { .. } | Error::Validation(_) => 1,
        Error::Data(_) | Error::Io { .. } | Error::Structural(_) => 2,
        Error::Provider { .. } | Error::Format { .. } => 3,
    }
}

fn run(cli: Cli) -> boolrule::Result<()> {
    let c = cli.common;
    let mut cfg = match &c.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    cfg.offline |= c.offline;
    macro_rules! set {
        ($($field:ident),*) => { $( if c.$field.is_some() { cfg.$field = c.$field; } )* };
    }
    set!(fixtures, data, selection, thresholds);
    if let Some(t) = c.target {
        cfg.target = t;
    }
    if let Some(p) = c.positive_label {
        cfg.positive_label = p;
    }
    if let Command::Train { iterations, restarts, .. } = &cli.command {
        if let Some(n) = iterations {
            cfg.objective.iterations = *n;
        }
        if let Some(n) = restarts {
            cfg.objective.restarts = *n;
        }
    }
    cfg.objective.seed = cfg.seed;
    cfg.validate()?;

    let out = commands::Output(c.out);
    match cli.command {
        Command::Summarize => commands::summarize(&cfg, &out),
        Command::SelectFeatures => commands::select_features(&cfg, &out),
        Command::SuggestThresholds => commands::suggest_thresholds(&cfg, &out),
        Command::Binarize { matrix } => commands::binarize(&cfg, &out, matrix.as_deref()),
        Command::Train { trace, .. } => commands::train(&cfg, &out, trace.as_deref()),
        Command::Evaluate { model, rules, full } => commands::evaluate(&cfg, &out, model.as_deref(), &rules, full),
        Command::Explain { model, row, instance } => {
            commands::explain(&cfg, &out, &model, row, instance.as_deref())
        }
        Command::Cluster { model, rules, k, auto_k, provider_embeddings } => {
            commands::cluster(&cfg, &out, model.as_deref(), &rules, k, auto_k, provider_embeddings)
        }
    }
}
