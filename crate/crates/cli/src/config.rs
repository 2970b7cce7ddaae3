//! Flat `key = value` run configuration. Lines starting with `#` are
//! comments; later assignments win, and command-line flags are applied
//! last.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sentimen::baselines::{CompareConfig, LinearConfig};
use sentimen::ingest::fetch::DEFAULT_BASE_URL;
use sentimen::ingest::CsvSchema;
use sentimen::nn::{Dims, DEFAULT_FC_DROPOUT, DEFAULT_LSTM_DROPOUT};
use sentimen::preprocess::Steps;
use sentimen::train::TrainConfig;
use sentimen::SplitSpec;

use crate::error::CliError;

/// How class weights for the loss are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassWeights {
    None,
    /// Inverse class frequency on the training split.
    Balanced,
    Fixed([f64; 2]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,

    pub csv_id: String,
    pub csv_source: String,
    pub csv_text: String,
    pub csv_label: String,
    pub csv_lenient: bool,

    pub split: [f64; 3],

    pub steps: Steps,
    pub stopwords_after_stem: bool,
    pub roots_file: Option<PathBuf>,
    pub stopwords_file: Option<PathBuf>,
    pub slang_file: Option<PathBuf>,

    pub min_freq: usize,
    /// 0 picks the length from the training split.
    pub max_len: usize,

    pub embed: usize,
    pub hidden: usize,
    pub lstm_dropout: f64,
    pub lstm_dropout_enabled: bool,
    pub fc_dropout: f64,

    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub class_weights: ClassWeights,
    pub shuffle: bool,

    pub compare_lstm: bool,
    pub compare_naive_bayes: bool,
    pub compare_logistic: bool,
    pub compare_svm: bool,
    pub logistic_lambda: f64,
    pub logistic_lr: f64,
    pub logistic_epochs: usize,
    pub svm_lambda: f64,
    pub svm_epochs: usize,

    pub fetch_base_url: String,
    pub fetch_page_size: u32,
    pub fetch_max_pages: usize,
    pub fetch_retries: u32,
    pub fetch_backoff_ms: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        let lr = LinearConfig::logistic();
        let svm = LinearConfig::svm();
        let schema = CsvSchema::default();
        Self {
            seed: 42,
            out_dir: PathBuf::from("out"),
            csv_id: schema.id,
            csv_source: schema.source,
            csv_text: schema.text,
            csv_label: schema.label,
            csv_lenient: false,
            split: [0.70, 0.15, 0.15],
            steps: Steps::ALL,
            stopwords_after_stem: true,
            roots_file: None,
            stopwords_file: None,
            slang_file: None,
            min_freq: 1,
            max_len: 0,
            embed: 128,
            hidden: 128,
            lstm_dropout: DEFAULT_LSTM_DROPOUT,
            lstm_dropout_enabled: false,
            fc_dropout: DEFAULT_FC_DROPOUT,
            batch_size: t.batch_size,
            learning_rate: t.learning_rate,
            epochs: t.epochs,
            class_weights: ClassWeights::None,
            shuffle: t.shuffle,
            compare_lstm: true,
            compare_naive_bayes: true,
            compare_logistic: true,
            compare_svm: true,
            logistic_lambda: lr.lambda,
            logistic_lr: lr.lr,
            logistic_epochs: lr.epochs,
            svm_lambda: svm.lambda,
            svm_epochs: svm.epochs,
            fetch_base_url: DEFAULT_BASE_URL.to_string(),
            fetch_page_size: 100,
            fetch_max_pages: 10,
            fetch_retries: 3,
            fetch_backoff_ms: 500,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Input(format!("config key `{key}`: cannot parse `{v}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(CliError::Input(format!("config key `{key}`: expected true or false, got `{v}`"))),
    }
}

fn opt_path(v: &str) -> Option<PathBuf> {
    (!v.is_empty()).then(|| PathBuf::from(v))
}

fn show_path(p: &Option<PathBuf>) -> String {
    p.as_ref().map_or(String::new(), |p| p.display().to_string())
}

impl RunConfig {
    /// Parses config text on top of the defaults.
    pub fn from_text(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut c = Self::default();
        c.apply_text(text, origin)?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_text(&text, &path.display().to_string())
    }

    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Input(format!("{origin}:{}: expected `key = value`", i + 1)));
            };
            self.set(k.trim(), v.trim())
                .map_err(|e| CliError::Input(format!("{origin}:{}: {}", i + 1, e.message())))?;
        }
        Ok(())
    }

    /// `key=value` override from the command line.
    pub fn apply_override(&mut self, kv: &str) -> Result<(), CliError> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("--set expects key=value, got `{kv}`")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "seed" => self.seed = parse(key, v)?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "csv.id_column" => self.csv_id = v.to_string(),
            "csv.source_column" => self.csv_source = v.to_string(),
            "csv.text_column" => self.csv_text = v.to_string(),
            "csv.label_column" => self.csv_label = v.to_string(),
            "csv.lenient" => self.csv_lenient = parse_bool(key, v)?,
            "split.train" => self.split[0] = parse(key, v)?,
            "split.val" => self.split[1] = parse(key, v)?,
            "split.test" => self.split[2] = parse(key, v)?,
            "preprocess.case_fold" => self.steps.case_fold = parse_bool(key, v)?,
            "preprocess.clean" => self.steps.clean = parse_bool(key, v)?,
            "preprocess.normalize" => self.steps.normalize = parse_bool(key, v)?,
            "preprocess.tokenize" => self.steps.tokenize = parse_bool(key, v)?,
            "preprocess.stopwords" => self.steps.stopwords = parse_bool(key, v)?,
            "preprocess.stem" => self.steps.stem = parse_bool(key, v)?,
            "preprocess.stopwords_after_stem" => self.stopwords_after_stem = parse_bool(key, v)?,
            "preprocess.roots_file" => self.roots_file = opt_path(v),
            "preprocess.stopwords_file" => self.stopwords_file = opt_path(v),
            "preprocess.slang_file" => self.slang_file = opt_path(v),
            "vocab.min_freq" => self.min_freq = parse(key, v)?,
            "vocab.max_len" => self.max_len = parse(key, v)?,
            "model.embed" => self.embed = parse(key, v)?,
            "model.hidden" => self.hidden = parse(key, v)?,
            "model.lstm_dropout" => self.lstm_dropout = parse(key, v)?,
            "model.lstm_dropout_enabled" => self.lstm_dropout_enabled = parse_bool(key, v)?,
            "model.fc_dropout" => self.fc_dropout = parse(key, v)?,
            "train.batch_size" => self.batch_size = parse(key, v)?,
            "train.learning_rate" => self.learning_rate = parse(key, v)?,
            "train.epochs" => self.epochs = parse(key, v)?,
            "train.class_weights" => {
                self.class_weights = match v {
                    "" | "none" => ClassWeights::None,
                    "balanced" => ClassWeights::Balanced,
                    _ => {
                        let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                        if parts.len() != 2 {
                            return Err(CliError::Input(format!(
                                "config key `{key}`: expected none, balanced or `w_negative,w_positive`, got `{v}`"
                            )));
                        }
                        ClassWeights::Fixed([parse(key, parts[0])?, parse(key, parts[1])?])
                    }
                }
            }
            "train.shuffle" => self.shuffle = parse_bool(key, v)?,
            "compare.lstm" => self.compare_lstm = parse_bool(key, v)?,
            "compare.naive_bayes" => self.compare_naive_bayes = parse_bool(key, v)?,
            "compare.logistic" => self.compare_logistic = parse_bool(key, v)?,
            "compare.svm" => self.compare_svm = parse_bool(key, v)?,
            "compare.logistic_lambda" => self.logistic_lambda = parse(key, v)?,
            "compare.logistic_lr" => self.logistic_lr = parse(key, v)?,
            "compare.logistic_epochs" => self.logistic_epochs = parse(key, v)?,
            "compare.svm_lambda" => self.svm_lambda = parse(key, v)?,
            "compare.svm_epochs" => self.svm_epochs = parse(key, v)?,
            "fetch.base_url" => self.fetch_base_url = v.to_string(),
            "fetch.page_size" => self.fetch_page_size = parse(key, v)?,
            "fetch.max_pages" => self.fetch_max_pages = parse(key, v)?,
            "fetch.retries" => self.fetch_retries = parse(key, v)?,
            "fetch.backoff_ms" => self.fetch_backoff_ms = parse(key, v)?,
            _ => return Err(CliError::Input(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Every key with its resolved value, in a fixed order. Parsing the
    /// result gives back an equal config.
    pub fn render(&self) -> String {
        self.render_inner(true)
    }

    /// [`render`](Self::render) without `out_dir`, for embedding in model
    /// files so that identical runs into different directories give
    /// identical bytes.
    pub fn render_portable(&self) -> String {
        self.render_inner(false)
    }

    fn render_inner(&self, with_out_dir: bool) -> String {
        let weights = match &self.class_weights {
            ClassWeights::None => "none".to_string(),
            ClassWeights::Balanced => "balanced".to_string(),
            ClassWeights::Fixed([a, b]) => format!("{a},{b}"),
        };
        let s = &self.steps;
        let pairs: Vec<(&str, String)> = vec![
            ("seed", self.seed.to_string()),
            ("out_dir", self.out_dir.display().to_string()),
            ("csv.id_column", self.csv_id.clone()),
            ("csv.source_column", self.csv_source.clone()),
            ("csv.text_column", self.csv_text.clone()),
            ("csv.label_column", self.csv_label.clone()),
            ("csv.lenient", self.csv_lenient.to_string()),
            ("split.train", self.split[0].to_string()),
            ("split.val", self.split[1].to_string()),
            ("split.test", self.split[2].to_string()),
            ("preprocess.case_fold", s.case_fold.to_string()),
            ("preprocess.clean", s.clean.to_string()),
            ("preprocess.normalize", s.normalize.to_string()),
            ("preprocess.tokenize", s.tokenize.to_string()),
            ("preprocess.stopwords", s.stopwords.to_string()),
            ("preprocess.stem", s.stem.to_string()),
            ("preprocess.stopwords_after_stem", self.stopwords_after_stem.to_string()),
            ("preprocess.roots_file", show_path(&self.roots_file)),
            ("preprocess.stopwords_file", show_path(&self.stopwords_file)),
            ("preprocess.slang_file", show_path(&self.slang_file)),
            ("vocab.min_freq", self.min_freq.to_string()),
            ("vocab.max_len", self.max_len.to_string()),
            ("model.embed", self.embed.to_string()),
            ("model.hidden", self.hidden.to_string()),
            ("model.lstm_dropout", self.lstm_dropout.to_string()),
            ("model.lstm_dropout_enabled", self.lstm_dropout_enabled.to_string()),
            ("model.fc_dropout", self.fc_dropout.to_string()),
            ("train.batch_size", self.batch_size.to_string()),
            ("train.learning_rate", self.learning_rate.to_string()),
            ("train.epochs", self.epochs.to_string()),
            ("train.class_weights", weights),
            ("train.shuffle", self.shuffle.to_string()),
            ("compare.lstm", self.compare_lstm.to_string()),
            ("compare.naive_bayes", self.compare_naive_bayes.to_string()),
            ("compare.logistic", self.compare_logistic.to_string()),
            ("compare.svm", self.compare_svm.to_string()),
            ("compare.logistic_lambda", self.logistic_lambda.to_string()),
            ("compare.logistic_lr", self.logistic_lr.to_string()),
            ("compare.logistic_epochs", self.logistic_epochs.to_string()),
            ("compare.svm_lambda", self.svm_lambda.to_string()),
            ("compare.svm_epochs", self.svm_epochs.to_string()),
            ("fetch.base_url", self.fetch_base_url.clone()),
            ("fetch.page_size", self.fetch_page_size.to_string()),
            ("fetch.max_pages", self.fetch_max_pages.to_string()),
            ("fetch.retries", self.fetch_retries.to_string()),
            ("fetch.backoff_ms", self.fetch_backoff_ms.to_string()),
        ];
        let mut out = String::from("# resolved configuration\n");
        for (k, v) in pairs.into_iter().filter(|(k, _)| with_out_dir || *k != "out_dir") {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn schema(&self) -> CsvSchema {
        CsvSchema {
            id: self.csv_id.clone(),
            source: self.csv_source.clone(),
            text: self.csv_text.clone(),
            label: self.csv_label.clone(),
        }
    }

    pub fn split_spec(&self) -> Result<SplitSpec, CliError> {
        SplitSpec::new(self.split[0], self.split[1], self.split[2], self.seed).map_err(|e| CliError::Input(e.to_string()))
    }

    pub fn dims(&self, vocab: usize) -> Dims {
        Dims {
            vocab,
            embed: self.embed,
            hidden: self.hidden,
            classes: 2,
        }
    }

    /// Training settings; balanced weights need the training class counts.
    pub fn train_config(&self, counts: [usize; 2]) -> Result<TrainConfig, CliError> {
        let class_weights = match &self.class_weights {
            ClassWeights::None => None,
            ClassWeights::Fixed(w) => Some(w.to_vec()),
            ClassWeights::Balanced => Some(
                sentimen::train::inverse_frequency_weights(&counts).map_err(|e| CliError::Input(e.to_string()))?,
            ),
        };
        let cfg = TrainConfig {
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            seed: self.seed,
            class_weights,
            shuffle: self.shuffle,
        };
        cfg.validate().map_err(|e| CliError::Input(e.to_string()))?;
        Ok(cfg)
    }

    pub fn compare_config(&self) -> CompareConfig {
        CompareConfig {
            naive_bayes: self.compare_naive_bayes,
            logistic: self.compare_logistic,
            svm: self.compare_svm,
            logistic_cfg: LinearConfig {
                lambda: self.logistic_lambda,
                lr: self.logistic_lr,
                epochs: self.logistic_epochs,
                seed: self.seed,
                ..LinearConfig::logistic()
            },
            svm_cfg: LinearConfig {
                lambda: self.svm_lambda,
                epochs: self.svm_epochs,
                seed: self.seed,
                ..LinearConfig::svm()
            },
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.split_spec()?;
        let bad = |m: String| Err(CliError::Input(m));
        if self.embed == 0 || self.hidden == 0 {
            return bad("model.embed and model.hidden must be at least 1".into());
        }
        if self.min_freq == 0 {
            return bad("vocab.min_freq must be at least 1".into());
        }
        for (k, p) in [("model.lstm_dropout", self.lstm_dropout), ("model.fc_dropout", self.fc_dropout)] {
            if !(0.0..1.0).contains(&p) {
                return bad(format!("{k} must be in [0, 1), got {p}"));
            }
        }
        Ok(())
    }
}
