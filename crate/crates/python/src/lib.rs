//! Python bindings: preprocessing, vocabulary, model loading and
//! prediction, training and evaluation.

use std::path::{Path, PathBuf};

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sentimen::eval::{self, ClassificationReport};
use sentimen::preprocess::{run_pipeline, Steps};
use sentimen::{nn, vocab, Label, PreprocessConfig};
use sentimen_cli::{cmd_train, CliError, Context, LoadedModel, RunConfig};

fn cli_err(e: CliError) -> PyErr {
    match e {
        CliError::Input(m) => PyValueError::new_err(m),
        CliError::External(m) => PyIOError::new_err(m),
        CliError::Internal(m) => PyRuntimeError::new_err(m),
    }
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_labels(v: &[String]) -> PyResult<Vec<Label>> {
    v.iter().map(|s| s.parse::<Label>().map_err(value_err)).collect()
}

/// Run the preprocessing pipeline with the bundled dictionaries.
#[pyfunction]
#[pyo3(signature = (text, stem = true, stopwords = true))]
fn preprocess(text: &str, stem: bool, stopwords: bool) -> Vec<String> {
    let steps = Steps {
        stem,
        stopwords,
        ..Steps::default()
    };
    run_pipeline(text, &PreprocessConfig::bundled().with_steps(steps))
}

/// Stem one lowercase word.
#[pyfunction]
fn stem(word: &str) -> String {
    PreprocessConfig::bundled().stemmer.stem(word)
}

#[pyfunction]
fn count_parameters(vocab: u64, embed: u64, hidden: u64, classes: u64) -> u64 {
    nn::count_parameters(vocab, embed, hidden, classes)
}

/// Token to index mapping; index 0 is padding, 1 is unknown.
#[pyclass(name = "Vocabulary", module = "sentimen_py")]
struct PyVocabulary(vocab::Vocabulary);

#[pymethods]
impl PyVocabulary {
    #[staticmethod]
    #[pyo3(signature = (corpus, min_freq = 1))]
    fn build(corpus: Vec<Vec<String>>, min_freq: usize) -> PyResult<Self> {
        vocab::build_vocab(&corpus, min_freq).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        vocab::Vocabulary::load(path).map(Self).map_err(value_err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.0.save(path).map_err(value_err)
    }

    fn __len__(&self) -> usize {
        self.0.size()
    }

    #[getter]
    fn max_len(&self) -> usize {
        self.0.max_len
    }

    fn index_of(&self, token: &str) -> u32 {
        self.0.index_of(token)
    }

    fn tokens(&self) -> Vec<String> {
        self.0.tokens().to_vec()
    }

    /// Returns `(indices, true_length)`, padded or truncated to `max_len`.
    fn encode(&self, tokens: Vec<String>) -> (Vec<u32>, usize) {
        let s = self.0.encode(&tokens);
        (s.indices, s.true_length)
    }
}

/// A trained checkpoint together with its vocabulary and preprocessing.
#[pyclass(name = "Model", module = "sentimen_py")]
struct PyModel(LoadedModel);

#[pymethods]
impl PyModel {
    /// The vocabulary defaults to the one recorded in the checkpoint,
    /// resolved relative to the checkpoint's directory.
    #[staticmethod]
    #[pyo3(signature = (checkpoint, vocab = None))]
    fn load(checkpoint: PathBuf, vocab: Option<PathBuf>) -> PyResult<Self> {
        sentimen_cli::load_model(&checkpoint, vocab.as_deref())
            .map(Self)
            .map_err(cli_err)
    }

    /// `(vocab, embed, hidden, classes)`.
    #[getter]
    fn dims(&self) -> (usize, usize, usize, usize) {
        let d = self.0.checkpoint.params.dims();
        (d.vocab, d.embed, d.hidden, d.classes)
    }

    fn parameter_count(&self) -> u64 {
        let d = self.0.checkpoint.params.dims();
        nn::count_parameters(d.vocab as u64, d.embed as u64, d.hidden as u64, d.classes as u64)
    }

    /// Returns `(label, p_negative, p_positive, low_confidence)`.
    fn predict(&self, text: &str) -> PyResult<(String, f64, f64, bool)> {
        let p = self.0.predict(text).map_err(cli_err)?;
        Ok((
            p.label.as_str().to_string(),
            p.probabilities[0],
            p.probabilities[1],
            p.low_confidence,
        ))
    }

    fn predict_many(&self, texts: Vec<String>) -> PyResult<Vec<String>> {
        texts
            .iter()
            .map(|t| Ok(self.0.predict(t).map_err(cli_err)?.label.as_str().to_string()))
            .collect()
    }
}

/// Train on a labeled CSV, writing all artifacts to `out_dir`.
///
/// `overrides` are `key=value` strings as accepted by the command line.
/// Returns a dict with `history`, `best_epoch`, `parameters`,
/// `vocab_size` and `max_len`.
#[pyfunction]
#[pyo3(signature = (input, out_dir, overrides = Vec::new(), config = None))]
fn train<'py>(
    py: Python<'py>,
    input: PathBuf,
    out_dir: PathBuf,
    overrides: Vec<String>,
    config: Option<PathBuf>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = match config {
        Some(p) => RunConfig::load(&p).map_err(cli_err)?,
        None => RunConfig::default(),
    };
    for kv in &overrides {
        cfg.apply_override(kv).map_err(cli_err)?;
    }
    cfg.out_dir = out_dir;
    let s = py
        .allow_threads(|| cmd_train(&Context::new(cfg, true), Path::new(&input)))
        .map_err(cli_err)?;
    let history = s
        .history
        .iter()
        .map(|e| {
            let d = PyDict::new(py);
            d.set_item("epoch", e.epoch)?;
            d.set_item("train_loss", e.train_loss)?;
            d.set_item("train_accuracy", e.train_accuracy)?;
            d.set_item("val_loss", e.val_loss)?;
            d.set_item("val_accuracy", e.val_accuracy)?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let out = PyDict::new(py);
    out.set_item("history", history)?;
    out.set_item("best_epoch", s.best_epoch)?;
    out.set_item("parameters", s.parameters)?;
    out.set_item("vocab_size", s.vocab_size)?;
    out.set_item("max_len", s.max_len)?;
    Ok(out)
}

/// Per-class and averaged metrics for the positive/negative task.
#[pyclass(name = "Report", module = "sentimen_py")]
struct PyReport(ClassificationReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn accuracy(&self) -> f64 {
        self.0.accuracy
    }

    #[getter]
    fn total(&self) -> u64 {
        self.0.total
    }

    #[getter]
    fn zero_division(&self) -> bool {
        self.0.zero_division()
    }

    /// `(precision, recall, f1, support)` for "positive" or "negative".
    fn class_metrics(&self, label: &str) -> PyResult<(f64, f64, f64, u64)> {
        let m = self.0.class(label.parse::<Label>().map_err(value_err)?);
        Ok((m.precision, m.recall, m.f1, m.support))
    }

    /// `(precision, recall, f1)`.
    #[getter]
    fn macro_avg(&self) -> (f64, f64, f64) {
        let a = &self.0.macro_avg;
        (a.precision, a.recall, a.f1)
    }

    #[getter]
    fn weighted_avg(&self) -> (f64, f64, f64) {
        let a = &self.0.weighted_avg;
        (a.precision, a.recall, a.f1)
    }

    fn text(&self) -> String {
        eval::render_text(&self.0)
    }

    fn __str__(&self) -> String {
        self.text()
    }
}

#[pyfunction]
fn classification_report(predictions: Vec<String>, truth: Vec<String>) -> PyResult<PyReport> {
    let p = parse_labels(&predictions)?;
    let t = parse_labels(&truth)?;
    eval::report(&p, &t).map(PyReport).map_err(value_err)
}

/// Report from confusion counts with positive as the reference class.
#[pyfunction]
fn report_from_confusion(tp: u64, fn_: u64, fp: u64, tn: u64) -> PyResult<PyReport> {
    eval::report_from_confusion(&eval::ConfusionMatrix { tp, fn_, fp, tn })
        .map(PyReport)
        .map_err(value_err)
}

#[pymodule]
fn sentimen_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(preprocess, m)?)?;
    m.add_function(wrap_pyfunction!(stem, m)?)?;
    m.add_function(wrap_pyfunction!(count_parameters, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(classification_report, m)?)?;
    m.add_function(wrap_pyfunction!(report_from_confusion, m)?)?;
    m.add_class::<PyVocabulary>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyReport>()?;
    Ok(())
}
