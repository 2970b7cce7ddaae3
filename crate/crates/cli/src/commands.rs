use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use sentimen::baselines::{compare_models, render_comparison, write_comparison_csv, ComparisonRow};
use sentimen::eval::{self, ConfusionMatrix};
use sentimen::ingest::{self, CommentsClient, LoadMode};
use sentimen::nn::{self, Checkpoint, ModelParams};
use sentimen::plot;
use sentimen::train::{self, EncodedSet, EpochStats};
use sentimen::vocab::{build_vocab, default_max_len};
use sentimen::{Dataset, Label, PreprocessConfig, TokenList, Vocabulary};

use crate::config::RunConfig;
use crate::error::CliError;

pub const RESOLVED_CONFIG: &str = "config.resolved.txt";
pub const HISTORY: &str = "history.csv";
pub const FINAL_CHECKPOINT: &str = "model.ckpt";
pub const BEST_CHECKPOINT: &str = "model_best.ckpt";
pub const VOCAB: &str = "vocab.txt";

/// Resolved configuration plus output verbosity.
#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: RunConfig,
    pub quiet: bool,
}

impl Context {
    pub fn new(cfg: RunConfig, quiet: bool) -> Self {
        Self { cfg, quiet }
    }

    fn info(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn warn(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("warning: {}", msg.as_ref());
        }
    }

    fn out(&self, name: &str) -> PathBuf {
        self.cfg.out_dir.join(name)
    }

    /// Creates the output directory and echoes the resolved config into it.
    pub fn prepare(&self) -> Result<(), CliError> {
        self.cfg.validate()?;
        let dir = &self.cfg.out_dir;
        fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))?;
        write_file(&self.out(RESOLVED_CONFIG), self.cfg.render().as_bytes())
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

fn preprocess_config(cfg: &RunConfig) -> Result<PreprocessConfig, CliError> {
    let mut p = PreprocessConfig::bundled()
        .with_steps(cfg.steps)
        .load_overrides(cfg.roots_file.as_deref(), cfg.stopwords_file.as_deref(), cfg.slang_file.as_deref())?;
    p.stopwords_after_stem = cfg.stopwords_after_stem;
    Ok(p)
}

fn load_corpus(ctx: &Context, path: &Path) -> Result<Dataset, CliError> {
    let mode = if ctx.cfg.csv_lenient { LoadMode::Lenient } else { LoadMode::Strict };
    let loaded = ingest::load_csv(path, &ctx.cfg.schema(), mode)?;
    for s in &loaded.skipped {
        ctx.warn(format!("{}: skipped row {}: {}", path.display(), s.row, s.reason));
    }
    Ok(loaded.dataset)
}

fn texts(ds: &Dataset) -> Vec<&str> {
    ds.records().iter().map(|r| r.text.as_str()).collect()
}

fn labels(ds: &Dataset) -> Vec<Label> {
    ds.records().iter().filter_map(|r| r.label).collect()
}

fn write_corpus(path: &Path, ds: &Dataset) -> Result<(), CliError> {
    let w = create(path)?;
    ingest::write_csv(w, ds.records(), None)?;
    Ok(())
}

/// Downloads top-level comments of one video as an unlabeled corpus CSV.
/// Nothing is written unless the whole download succeeds.
pub fn cmd_fetch(
    ctx: &Context,
    api_key: &str,
    video_id: &str,
    max_pages: Option<usize>,
    output: Option<&Path>,
) -> Result<PathBuf, CliError> {
    ctx.prepare()?;
    let c = &ctx.cfg;
    let client = CommentsClient::with_base_url(&c.fetch_base_url, api_key)
        .page_size(c.fetch_page_size)
        .retries(c.fetch_retries, Duration::from_millis(c.fetch_backoff_ms));
    let comments = client.fetch_comments(video_id, max_pages.unwrap_or(c.fetch_max_pages))?;
    let path = output.map_or_else(|| ctx.out("comments.csv"), Path::to_path_buf);
    let mut buf = Vec::new();
    ingest::write_csv(&mut buf, &comments, None)?;
    write_file(&path, &buf)?;
    ctx.info(format!("fetched {} comments into {}", comments.len(), path.display()));
    Ok(path)
}

/// Adds a space-joined `tokens` column to a corpus CSV.
pub fn cmd_preprocess(ctx: &Context, input: &Path, output: Option<&Path>) -> Result<PathBuf, CliError> {
    ctx.prepare()?;
    let pcfg = preprocess_config(&ctx.cfg)?;
    let ds = load_corpus(ctx, input)?;
    let tokens: Vec<String> = sentimen::preprocess::run_batch(&texts(&ds), &pcfg)
        .into_iter()
        .map(|t| t.join(" "))
        .collect();
    let path = output.map_or_else(|| ctx.out("preprocessed.csv"), Path::to_path_buf);
    let w = create(&path)?;
    ingest::write_csv(w, ds.records(), Some(("tokens", &tokens)))?;
    let empty = tokens.iter().filter(|t| t.is_empty()).count();
    ctx.info(format!(
        "preprocessed {} comments into {} ({empty} empty after preprocessing)",
        ds.len(),
        path.display()
    ));
    Ok(path)
}

/// Corpus after splitting and preprocessing.
struct Prepared {
    split: ingest::Split,
    train_tokens: Vec<TokenList>,
    val_tokens: Vec<TokenList>,
    test_tokens: Vec<TokenList>,
}

fn prepare_corpus(ctx: &Context, input: &Path, write_splits: bool) -> Result<Prepared, CliError> {
    let ds = load_corpus(ctx, input)?.labeled_only();
    if ds.is_empty() {
        return Err(CliError::Input(format!("{} has no labeled comments", input.display())));
    }
    let split = ingest::stratified_split(&ds, &ctx.cfg.split_spec()?)?;
    ctx.info(format!(
        "split {} labeled comments into {} train / {} val / {} test",
        ds.len(),
        split.train.len(),
        split.val.len(),
        split.test.len()
    ));
    if write_splits {
        write_corpus(&ctx.out("train.csv"), &split.train)?;
        write_corpus(&ctx.out("val.csv"), &split.val)?;
        write_corpus(&ctx.out("test.csv"), &split.test)?;
    }
    let pcfg = preprocess_config(&ctx.cfg)?;
    let run = |d: &Dataset| sentimen::preprocess::run_batch(&texts(d), &pcfg);
    Ok(Prepared {
        train_tokens: run(&split.train),
        val_tokens: run(&split.val),
        test_tokens: run(&split.test),
        split,
    })
}

/// What a training run produced.
#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub history: Vec<EpochStats>,
    pub best_epoch: Option<usize>,
    pub parameters: u64,
    pub vocab_size: usize,
    pub max_len: usize,
}

struct Trained {
    params: ModelParams,
    vocab: Vocabulary,
    summary: TrainSummary,
    outcome: train::TrainOutcome,
}

fn fit_lstm(ctx: &Context, prep: &Prepared) -> Result<Trained, CliError> {
    let c = &ctx.cfg;
    let mut vocab = build_vocab(&prep.train_tokens, c.min_freq)?;
    vocab.max_len = if c.max_len > 0 {
        c.max_len
    } else {
        default_max_len(&prep.train_tokens.iter().map(Vec::len).collect::<Vec<_>>())
    };
    let train_set = EncodedSet::encode(&prep.train_tokens, &labels(&prep.split.train), &vocab)?;
    let val_set = EncodedSet::encode(&prep.val_tokens, &labels(&prep.split.val), &vocab)?;
    let tcfg = c.train_config(train_set.counts())?;

    let mut params = train::init_model(c.dims(vocab.size()), c.seed);
    params.lstm_dropout = c.lstm_dropout;
    params.lstm_dropout_enabled = c.lstm_dropout_enabled;
    params.fc_dropout = c.fc_dropout;
    if c.lstm_dropout_enabled {
        ctx.warn(format!(
            "dropout {} on the LSTM output is enabled on top of dense dropout {}",
            c.lstm_dropout, c.fc_dropout
        ));
    }
    if c.epochs == 0 {
        ctx.warn("train.epochs is 0; the model keeps its initial weights");
    }
    ctx.info(format!(
        "vocabulary {} entries, max_len {}, {} parameters",
        vocab.size(),
        vocab.max_len,
        params.num_parameters()
    ));
    let epochs = tcfg.epochs;
    let outcome = train::train(&mut params, &train_set, &val_set, &tcfg, |s| {
        ctx.info(format!(
            "epoch {}/{epochs}  train_loss {:.4}  train_acc {:.4}  val_loss {:.4}  val_acc {:.4}",
            s.epoch, s.train_loss, s.train_accuracy, s.val_loss, s.val_accuracy
        ));
    })?;
    let summary = TrainSummary {
        history: outcome.history.clone(),
        best_epoch: outcome.best.as_ref().map(|b| b.0),
        parameters: params.num_parameters(),
        vocab_size: vocab.size(),
        max_len: vocab.max_len,
    };
    Ok(Trained {
        params,
        vocab,
        summary,
        outcome,
    })
}

/// Splits, preprocesses, builds the vocabulary and trains the LSTM.
/// Writes the splits, `history.csv`, both curve SVGs, the vocabulary and
/// the final and best checkpoints.
pub fn cmd_train(ctx: &Context, input: &Path) -> Result<TrainSummary, CliError> {
    ctx.prepare()?;
    let prep = prepare_corpus(ctx, input, true)?;
    let t = fit_lstm(ctx, &prep)?;

    let hist_path = ctx.out(HISTORY);
    let mut w = create(&hist_path)?;
    train::write_history(&mut w, &t.summary.history).map_err(|e| CliError::io(hist_path.display(), e))?;
    finish(w, &hist_path)?;
    write_file(&ctx.out("loss_curve.svg"), plot::loss_curve_svg(&t.summary.history).as_bytes())?;
    write_file(&ctx.out("accuracy_curve.svg"), plot::accuracy_curve_svg(&t.summary.history).as_bytes())?;

    t.vocab.save(ctx.out(VOCAB))?;
    let ckpt = |params: ModelParams, adam| Checkpoint {
        params,
        adam,
        max_len: t.vocab.max_len,
        vocab_ref: VOCAB.to_string(),
        config: ctx.cfg.render_portable(),
    };
    ckpt(t.params.clone(), Some(t.outcome.optimizer.clone())).save(ctx.out(FINAL_CHECKPOINT))?;
    if let Some((epoch, best)) = &t.outcome.best {
        ckpt(best.clone(), None).save(ctx.out(BEST_CHECKPOINT))?;
        ctx.info(format!("best validation accuracy at epoch {epoch}"));
    }
    ctx.info(format!("wrote model and history to {}", ctx.cfg.out_dir.display()));
    Ok(t.summary)
}

/// A checkpoint with everything needed to classify raw text.
pub struct LoadedModel {
    pub checkpoint: Checkpoint,
    pub vocab: Vocabulary,
    pub preprocess: PreprocessConfig,
}

/// Loads a checkpoint, its vocabulary (relative references resolve
/// against the checkpoint's directory) and the preprocessing settings it
/// was trained with.
pub fn load_model(path: &Path, vocab_override: Option<&Path>) -> Result<LoadedModel, CliError> {
    let checkpoint = Checkpoint::load(path)?;
    let vocab_path = match vocab_override {
        Some(v) => v.to_path_buf(),
        None => {
            let r = PathBuf::from(&checkpoint.vocab_ref);
            if r.is_absolute() {
                r
            } else {
                path.parent().unwrap_or(Path::new(".")).join(r)
            }
        }
    };
    let mut vocab = Vocabulary::load(&vocab_path)?;
    if vocab.size() != checkpoint.params.dims().vocab {
        return Err(CliError::Input(format!(
            "{} has {} entries but the checkpoint expects {}",
            vocab_path.display(),
            vocab.size(),
            checkpoint.params.dims().vocab
        )));
    }
    vocab.max_len = checkpoint.max_len;
    let trained_with = RunConfig::from_text(&checkpoint.config, &format!("{} (embedded config)", path.display()))?;
    let preprocess = preprocess_config(&trained_with)?;
    Ok(LoadedModel {
        checkpoint,
        vocab,
        preprocess,
    })
}

impl LoadedModel {
    pub fn predict(&self, text: &str) -> Result<nn::Prediction, CliError> {
        Ok(nn::predict(text, &self.checkpoint.params, &self.vocab, &self.preprocess)?)
    }
}

/// Source of the predictions to score.
pub enum EvalSource<'a> {
    /// Run a checkpoint over a labeled corpus CSV.
    Model {
        checkpoint: &'a Path,
        vocab: Option<&'a Path>,
        input: &'a Path,
    },
    /// CSV with `label` and `predicted` columns.
    Predictions(&'a Path),
}

fn read_prediction_pairs(path: &Path) -> Result<(Vec<Label>, Vec<Label>), CliError> {
    let bad = |m: String| CliError::Input(format!("{}: {m}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("missing column `{name}`")))
    };
    let (li, pi) = (col("label")?, col("predicted")?);
    let (mut truth, mut preds) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let parse = |k: usize| -> Result<Label, CliError> {
            let cell = rec.get(k).unwrap_or("");
            Label::parse_cell(cell)
                .map_err(|e| bad(format!("row {}: {e}", i + 2)))?
                .ok_or_else(|| bad(format!("row {}: empty label", i + 2)))
        };
        truth.push(parse(li)?);
        preds.push(parse(pi)?);
    }
    Ok((truth, preds))
}

/// Writes the classification report (text and CSV) and the confusion
/// matrix (CSV and SVG). Returns the report.
pub fn cmd_evaluate(ctx: &Context, source: EvalSource<'_>) -> Result<eval::ClassificationReport, CliError> {
    ctx.prepare()?;
    let (truth, preds) = match source {
        EvalSource::Predictions(p) => read_prediction_pairs(p)?,
        EvalSource::Model { checkpoint, vocab, input } => {
            let model = load_model(checkpoint, vocab)?;
            let ds = load_corpus(ctx, input)?.labeled_only();
            let mut preds = Vec::with_capacity(ds.len());
            let mut p_pos = Vec::with_capacity(ds.len());
            for r in ds.records() {
                let p = model.predict(&r.text)?;
                preds.push(p.label);
                p_pos.push(p.probabilities[Label::Positive.index()]);
            }
            let path = ctx.out("predictions.csv");
            let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Internal(e.to_string()))?;
            let rows = std::iter::once(["id".into(), "label".into(), "predicted".into(), "p_positive".into()]).chain(
                ds.records().iter().zip(&preds).zip(&p_pos).map(|((r, p), q)| {
                    [r.id.clone(), r.label.map_or("", Label::as_str).to_string(), p.as_str().to_string(), format!("{q:.6}")]
                }),
            );
            for row in rows {
                w.write_record(&row).map_err(|e| CliError::Internal(e.to_string()))?;
            }
            w.flush().map_err(|e| CliError::io(path.display(), e))?;
            (labels(&ds), preds)
        }
    };
    if truth.is_empty() {
        return Err(CliError::Input("nothing to evaluate: no labeled rows".into()));
    }
    let cm = eval::confusion(&preds, &truth)?;
    let report = eval::report_from_confusion(&cm)?;
    write_report(ctx, &report, &cm)?;
    if !ctx.quiet {
        print!("{}", eval::render_text(&report));
    }
    Ok(report)
}

fn write_report(ctx: &Context, r: &eval::ClassificationReport, cm: &ConfusionMatrix) -> Result<(), CliError> {
    write_file(&ctx.out("report.txt"), eval::render_text(r).as_bytes())?;
    let p = ctx.out("report.csv");
    let w = create(&p)?;
    eval::write_report_csv(w, r)?;
    let p = ctx.out("confusion.csv");
    let mut w = create(&p)?;
    eval::write_confusion_csv(&mut w, cm).map_err(|e| CliError::io(p.display(), e))?;
    finish(w, &p)?;
    write_file(&ctx.out("confusion.svg"), plot::confusion_svg(cm).as_bytes())
}

pub const EMPTY_INPUT_LINE: &str = "negative (low-confidence: empty after preprocessing)";

/// One output line per input text, in order: the label and the
/// probability of that label.
pub fn cmd_predict<W: Write>(
    ctx: &Context,
    checkpoint: &Path,
    vocab: Option<&Path>,
    texts: impl IntoIterator<Item = String>,
    mut out: W,
) -> Result<usize, CliError> {
    ctx.prepare()?;
    let model = load_model(checkpoint, vocab)?;
    let mut n = 0;
    for text in texts {
        let p = model.predict(&text)?;
        let line = if p.low_confidence {
            EMPTY_INPUT_LINE.to_string()
        } else {
            format!("{} {:.4}", p.label.as_str(), p.probabilities[p.label.index()])
        };
        writeln!(out, "{line}").map_err(|e| CliError::io("cannot write output", e))?;
        n += 1;
    }
    out.flush().map_err(|e| CliError::io("cannot write output", e))?;
    Ok(n)
}

/// Scores the classical baselines and the LSTM on the same test split.
/// With `checkpoint` the LSTM row comes from that model; otherwise one is
/// trained on the training split unless `compare.lstm` is off.
pub fn cmd_compare(ctx: &Context, input: &Path, checkpoint: Option<&Path>) -> Result<Vec<ComparisonRow>, CliError> {
    ctx.prepare()?;
    let prep = prepare_corpus(ctx, input, false)?;
    let test_labels = labels(&prep.split.test);
    if test_labels.is_empty() {
        return Err(CliError::Input("the test split is empty; raise split.test".into()));
    }
    let mut rows = compare_models(
        &prep.train_tokens,
        &labels(&prep.split.train),
        &prep.test_tokens,
        &test_labels,
        &ctx.cfg.compare_config(),
    )?;
    let lstm_preds = match checkpoint {
        Some(path) => {
            let model = load_model(path, None)?;
            let preds: Result<Vec<Label>, CliError> = prep
                .split
                .test
                .records()
                .iter()
                .map(|r| model.predict(&r.text).map(|p| p.label))
                .collect();
            Some(preds?)
        }
        None if ctx.cfg.compare_lstm => {
            let t = fit_lstm(ctx, &prep)?;
            let set = EncodedSet::encode(&prep.test_tokens, &test_labels, &t.vocab)?;
            let mut preds = train::predict_set(&t.params, &set)?;
            // same rule as predict(): no tokens means no positive call
            for (p, toks) in preds.iter_mut().zip(&prep.test_tokens) {
                if toks.is_empty() {
                    *p = Label::Negative;
                }
            }
            Some(preds)
        }
        None => None,
    };
    if let Some(p) = lstm_preds {
        rows.push(ComparisonRow::score("lstm", &p, &test_labels)?);
    }
    let table = render_comparison(&rows);
    write_file(&ctx.out("comparison.txt"), table.as_bytes())?;
    let p = ctx.out("comparison.csv");
    let mut w = create(&p)?;
    write_comparison_csv(&mut w, &rows).map_err(|e| CliError::io(p.display(), e))?;
    finish(w, &p)?;
    if !ctx.quiet {
        print!("{table}");
    }
    Ok(rows)
}
