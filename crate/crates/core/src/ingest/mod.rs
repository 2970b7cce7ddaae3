//! Labeled comment corpora: loading, class accounting and stratified splits.

mod corpus;
pub mod fetch;
mod split;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use corpus::{load_csv, write_csv, CsvSchema, LoadMode, Loaded, RowError};
pub use fetch::{CommentsClient, FetchError};
pub use split::{stratified_split, Split, SplitSpec};

/// Sentiment class. The discriminant is the class index used by every model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Negative = 0,
    Positive = 1,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Negative, Label::Positive];
    pub const COUNT: usize = 2;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Label> {
        match index {
            0 => Some(Label::Negative),
            1 => Some(Label::Positive),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Negative => "negative",
            Label::Positive => "positive",
        }
    }

    /// Parses a corpus label cell. The empty string means "unlabeled".
    pub fn parse_cell(cell: &str) -> Result<Option<Label>, IngestError> {
        match cell.trim() {
            "" => Ok(None),
            other => other.parse().map(Some),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "negative" => Ok(Label::Negative),
            "positive" => Ok(Label::Positive),
            other => Err(IngestError::BadLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledComment {
    pub id: String,
    /// Channel or video identifier; may be empty.
    pub source: String,
    pub text: String,
    /// `None` for comments that were collected but never labeled.
    pub label: Option<Label>,
}

impl LabeledComment {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Option<Label>) -> Self {
        Self {
            id: id.into(),
            source: String::new(),
            text: text.into(),
            label,
        }
    }
}

/// Per-label record tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LabelCounts {
    pub negative: usize,
    pub positive: usize,
    pub unlabeled: usize,
}

impl LabelCounts {
    pub fn get(&self, label: Label) -> usize {
        match label {
            Label::Negative => self.negative,
            Label::Positive => self.positive,
        }
    }

    pub fn labeled(&self) -> usize {
        self.negative + self.positive
    }

    pub fn total(&self) -> usize {
        self.labeled() + self.unlabeled
    }

    fn add(&mut self, label: Option<Label>) {
        match label {
            Some(Label::Negative) => self.negative += 1,
            Some(Label::Positive) => self.positive += 1,
            None => self.unlabeled += 1,
        }
    }
}

/// An ordered collection of comments whose counts always match its records.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    records: Vec<LabeledComment>,
    counts: LabelCounts,
}

impl Dataset {
    pub fn new(records: Vec<LabeledComment>) -> Self {
        let mut counts = LabelCounts::default();
        for r in &records {
            counts.add(r.label);
        }
        Self { records, counts }
    }

    pub fn records(&self) -> &[LabeledComment] {
        &self.records
    }

    pub fn into_records(self) -> Vec<LabeledComment> {
        self.records
    }

    pub fn counts(&self) -> LabelCounts {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn push(&mut self, record: LabeledComment) {
        self.counts.add(record.label);
        self.records.push(record);
    }

    /// Drops unlabeled records, keeping order.
    pub fn labeled_only(&self) -> Dataset {
        Dataset::new(
            self.records
                .iter()
                .filter(|r| r.label.is_some())
                .cloned()
                .collect(),
        )
    }
}

/// Class proportions over labeled records, indexed by [`Label::index`].
pub fn class_distribution(ds: &Dataset) -> Result<[f64; Label::COUNT], IngestError> {
    let counts = ds.counts();
    let labeled = counts.labeled();
    if labeled == 0 {
        return Err(IngestError::NoLabeledRecords);
    }
    let n = labeled as f64;
    let neg = counts.negative as f64 / n;
    // complement keeps the pair summing to one
    Ok([neg, 1.0 - neg])
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot open corpus {path}: {source}")]
    Open {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus is missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error("unknown label `{0}` (expected negative, positive or empty)")]
    BadLabel(String),
    #[error("dataset has no labeled records")]
    NoLabeledRecords,
    #[error("invalid split fractions: {0}")]
    BadSplit(String),
    #[error("record `{0}` is unlabeled; split only labeled data")]
    UnlabeledInSplit(String),
    #[error("class {label} has {have} records but {need} non-empty splits were requested")]
    ClassTooSmall {
        label: Label,
        have: usize,
        need: usize,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(neg: usize, pos: usize) -> Dataset {
        let mut records = Vec::new();
        for i in 0..neg {
            records.push(LabeledComment::new(format!("n{i}"), "buruk", Some(Label::Negative)));
        }
        for i in 0..pos {
            records.push(LabeledComment::new(format!("p{i}"), "bagus", Some(Label::Positive)));
        }
        Dataset::new(records)
    }

    #[test]
    fn distribution_of_reference_corpus_shape() {
        let d = class_distribution(&ds(5629, 790)).unwrap();
        assert!((d[0] - 5629.0 / 6419.0).abs() < 1e-15);
        assert_eq!((d[0] * 1000.0).round() / 10.0, 87.7);
        assert_eq!((d[1] * 1000.0).round() / 10.0, 12.3);
        assert!((d[0] + d[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distribution_small_cases() {
        assert_eq!(class_distribution(&ds(1, 1)).unwrap(), [0.5, 0.5]);
        assert_eq!(class_distribution(&ds(3, 1)).unwrap(), [0.75, 0.25]);
    }

    #[test]
    fn distribution_ignores_unlabeled_and_rejects_empty() {
        let mut d = ds(3, 1);
        d.push(LabeledComment::new("u", "??", None));
        assert_eq!(d.counts().unlabeled, 1);
        assert_eq!(class_distribution(&d).unwrap(), [0.75, 0.25]);

        let only_unlabeled = Dataset::new(vec![LabeledComment::new("u", "x", None)]);
        assert!(matches!(
            class_distribution(&only_unlabeled),
            Err(IngestError::NoLabeledRecords)
        ));
    }

    #[test]
    fn label_parsing() {
        assert_eq!(Label::parse_cell("negative").unwrap(), Some(Label::Negative));
        assert_eq!(Label::parse_cell(" Positive ").unwrap(), Some(Label::Positive));
        assert_eq!(Label::parse_cell("").unwrap(), None);
        assert!(Label::parse_cell("neutral").is_err());
    }
}
