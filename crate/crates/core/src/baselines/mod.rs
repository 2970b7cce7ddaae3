//! Classical comparison models over TF-IDF / bag-of-words features:
//! multinomial Naive Bayes, logistic regression and a linear SVM, plus a
//! majority-class floor.

mod linear;
mod naive_bayes;
mod tfidf;

use std::fmt::Write as _;
use std::io::Write;

use thiserror::Error;

use crate::eval::{report, EvalError};
use crate::ingest::Label;
use crate::preprocess::TokenList;

pub use linear::{
    linear_fit, logistic_gradient, logistic_objective, FitError, LinearConfig, LinearModel,
    Objective,
};
pub use naive_bayes::NaiveBayesModel;
pub use tfidf::{SparseVec, TfidfVectorizer};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{model}: {source}")]
    Fit {
        model: &'static str,
        #[source]
        source: FitError,
    },
}

/// Always predicts the most frequent training class; ties go to Negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MajorityClass(pub Label);

impl MajorityClass {
    pub fn fit(labels: &[Label]) -> Self {
        let pos = labels.iter().filter(|&&l| l == Label::Positive).count();
        if pos * 2 > labels.len() {
            Self(Label::Positive)
        } else {
            Self(Label::Negative)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub model: String,
    pub accuracy: f64,
    pub macro_f1: f64,
}

impl ComparisonRow {
    /// Scores `preds` against `truth`.
    pub fn score(model: &str, preds: &[Label], truth: &[Label]) -> Result<Self, EvalError> {
        let r = report(preds, truth)?;
        Ok(Self {
            model: model.to_string(),
            accuracy: r.accuracy,
            macro_f1: r.macro_avg.f1,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub naive_bayes: bool,
    pub logistic: bool,
    pub svm: bool,
    pub logistic_cfg: LinearConfig,
    pub svm_cfg: LinearConfig,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            naive_bayes: true,
            logistic: true,
            svm: true,
            logistic_cfg: LinearConfig::logistic(),
            svm_cfg: LinearConfig::svm(),
        }
    }
}

/// Fits every enabled baseline on the training documents and scores it on
/// the test documents. The majority-class row is always present. Models
/// are fitted in parallel; rows come back in a fixed order.
pub fn compare_models(
    train_docs: &[TokenList],
    train_labels: &[Label],
    test_docs: &[TokenList],
    test_labels: &[Label],
    cfg: &CompareConfig,
) -> Result<Vec<ComparisonRow>, BaselineError> {
    let majority = MajorityClass::fit(train_labels);
    let mut rows = vec![ComparisonRow::score(
        "majority",
        &vec![majority.0; test_labels.len()],
        test_labels,
    )?];

    let vec = TfidfVectorizer::fit(train_docs);
    let (nb, (lr, svm)) = rayon::join(
        || {
            cfg.naive_bayes.then(|| {
                let counts: Vec<SparseVec> = train_docs.iter().map(|d| vec.counts(d)).collect();
                let m = NaiveBayesModel::fit(&counts, train_labels, vec.len());
                test_docs.iter().map(|d| m.predict(&vec.counts(d))).collect::<Vec<_>>()
            })
        },
        || {
            let x: Vec<SparseVec> = train_docs.iter().map(|d| vec.transform(d)).collect();
            let fit = |c: &LinearConfig| {
                let m = linear_fit(&x, train_labels, vec.len(), c);
                m.map(|m| test_docs.iter().map(|d| m.predict(&vec.transform(d))).collect::<Vec<_>>())
            };
            rayon::join(
                || cfg.logistic.then(|| fit(&cfg.logistic_cfg)),
                || cfg.svm.then(|| fit(&cfg.svm_cfg)),
            )
        },
    );
    if let Some(p) = nb {
        rows.push(ComparisonRow::score("naive_bayes", &p, test_labels)?);
    }
    for (name, res) in [("logistic_regression", lr), ("linear_svm", svm)] {
        match res {
            Some(Ok(p)) => rows.push(ComparisonRow::score(name, &p, test_labels)?),
            Some(Err(source)) => return Err(BaselineError::Fit { model: name, source }),
            None => {}
        }
    }
    Ok(rows)
}

/// Aligned table with 4-decimal metrics.
pub fn render_comparison(rows: &[ComparisonRow]) -> String {
    let width = rows.iter().map(|r| r.model.len()).max().unwrap_or(0).max(5);
    let mut s = String::new();
    let _ = writeln!(s, "{:<width$}  {:>8}  {:>8}", "model", "accuracy", "macro_f1");
    for r in rows {
        let _ = writeln!(s, "{:<width$}  {:>8.4}  {:>8.4}", r.model, r.accuracy, r.macro_f1);
    }
    s
}

/// `model,accuracy,macro_f1` with 4-decimal metrics.
pub fn write_comparison_csv<W: Write>(mut w: W, rows: &[ComparisonRow]) -> std::io::Result<()> {
    writeln!(w, "model,accuracy,macro_f1")?;
    for r in rows {
        writeln!(w, "{},{:.4},{:.4}", r.model, r.accuracy, r.macro_f1)?;
    }
    Ok(())
}
