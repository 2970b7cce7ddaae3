use std::io::{self, BufRead};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sentimen::ingest::fetch::API_KEY_ENV;
use sentimen_cli::{
    cmd_compare, cmd_evaluate, cmd_fetch, cmd_predict, cmd_preprocess, cmd_train, CliError, Context, EvalSource,
    RunConfig,
};

/// Indonesian comment sentiment: preprocessing, LSTM training, evaluation
/// and baseline comparison.
#[derive(Parser)]
#[command(name = "sentimen", version)]
struct Cli {
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `seed` from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `out_dir` from the config.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Only errors on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Any config key, e.g. `--set train.epochs=5`. Applied after --config.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download top-level comments of a video (API key from the environment).
    Fetch {
        #[arg(long)]
        video: String,
        #[arg(long)]
        max_pages: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Add a `tokens` column to a corpus CSV.
    Preprocess {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Root word list replacing the bundled one.
        #[arg(long)]
        roots: Option<PathBuf>,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        /// `slang<TAB>standard` per line.
        #[arg(long)]
        slang: Option<PathBuf>,
    },
    /// Split a labeled corpus and train the LSTM.
    Train {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Score a checkpoint on a labeled CSV, or score precomputed predictions.
    Evaluate {
        #[arg(long, requires = "input", conflicts_with = "predictions")]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        vocab: Option<PathBuf>,
        /// CSV with `label` and `predicted` columns.
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Classify each --text, or each stdin line when none is given.
    Predict {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        vocab: Option<PathBuf>,
        #[arg(long)]
        text: Vec<String>,
    },
    /// Baselines and the LSTM on one test split.
    Compare {
        #[arg(long)]
        input: PathBuf,
        /// Use this model for the LSTM row instead of training one.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for kv in &cli.sets {
        cfg.apply_override(kv)?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(d) = &cli.out_dir {
        cfg.out_dir = d.clone();
    }
    match &cli.command {
        Command::Train { epochs: Some(e), .. } => cfg.epochs = *e,
        Command::Preprocess { roots, stopwords, slang, .. } => {
            if roots.is_some() {
                cfg.roots_file = roots.clone();
            }
            if stopwords.is_some() {
                cfg.stopwords_file = stopwords.clone();
            }
            if slang.is_some() {
                cfg.slang_file = slang.clone();
            }
        }
        _ => {}
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Context::new(resolve(&cli)?, cli.quiet);
    match &cli.command {
        Command::Fetch { video, max_pages, output } => {
            let key = std::env::var(API_KEY_ENV)
                .ok()
                .filter(|k| !k.trim().is_empty())
                .ok_or_else(|| CliError::Input(format!("set {API_KEY_ENV} to a comments API key")))?;
            cmd_fetch(&ctx, &key, video, *max_pages, output.as_deref())?;
        }
        Command::Preprocess { input, output, .. } => {
            cmd_preprocess(&ctx, input, output.as_deref())?;
        }
        Command::Train { input, .. } => {
            cmd_train(&ctx, input)?;
        }
        Command::Evaluate {
            checkpoint,
            input,
            vocab,
            predictions,
        } => {
            let source = match (checkpoint, input, predictions) {
                (Some(c), Some(i), None) => EvalSource::Model {
                    checkpoint: c,
                    vocab: vocab.as_deref(),
                    input: i,
                },
                (None, _, Some(p)) => EvalSource::Predictions(p),
                _ => {
                    return Err(CliError::Input(
                        "give either --checkpoint with --input, or --predictions".into(),
                    ))
                }
            };
            cmd_evaluate(&ctx, source)?;
        }
        Command::Predict { checkpoint, vocab, text } => {
            let stdout = io::stdout().lock();
            if text.is_empty() {
                let lines = io::stdin().lock().lines().map_while(Result::ok);
                cmd_predict(&ctx, checkpoint, vocab.as_deref(), lines, stdout)?;
            } else {
                cmd_predict(&ctx, checkpoint, vocab.as_deref(), text.iter().cloned(), stdout)?;
            }
        }
        Command::Compare { input, checkpoint } => {
            cmd_compare(&ctx, input, checkpoint.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
