use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::{Dataset, IngestError, Label, LabeledComment};

/// Column names for the corpus CSV. `source` is optional in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub id: String,
    pub source: String,
    pub text: String,
    pub label: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            id: "id".into(),
            source: "source".into(),
            text: "text".into(),
            label: "label".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoadMode {
    /// Abort on the first malformed row.
    #[default]
    Strict,
    /// Skip malformed rows and report them.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    /// 1-based line number in the file (the header is line 1).
    pub row: usize,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub dataset: Dataset,
    pub skipped: Vec<RowError>,
}

/// Reads a UTF-8 corpus CSV with a header row. Row order is preserved.
pub fn load_csv(
    path: impl AsRef<Path>,
    schema: &CsvSchema,
    mode: LoadMode,
) -> Result<Loaded, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| IngestError::Open {
        path: path.display().to_string(),
        source,
    })?;
    read_corpus(file, schema, mode)
}

pub(crate) fn read_corpus<R: std::io::Read>(
    reader: R,
    schema: &CsvSchema,
    mode: LoadMode,
) -> Result<Loaded, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let id_col = col(&schema.id).ok_or_else(|| IngestError::MissingColumn(schema.id.clone()))?;
    let text_col =
        col(&schema.text).ok_or_else(|| IngestError::MissingColumn(schema.text.clone()))?;
    let label_col =
        col(&schema.label).ok_or_else(|| IngestError::MissingColumn(schema.label.clone()))?;
    let source_col = col(&schema.source);

    let mut dataset = Dataset::default();
    let mut skipped = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let parsed = match rec {
            Ok(rec) => {
                let row = rec.position().map_or(line, |p| p.line() as usize);
                parse_row(&rec, id_col, source_col, text_col, label_col)
                    .map_err(|reason| RowError { row, reason })
            }
            Err(e) => Err(RowError {
                row: e.position().map_or(line, |p| p.line() as usize),
                reason: e.to_string(),
            }),
        };
        match parsed {
            Ok(c) => dataset.push(c),
            Err(e) if mode == LoadMode::Lenient => skipped.push(e),
            Err(e) => {
                return Err(IngestError::Row {
                    row: e.row,
                    reason: e.reason,
                })
            }
        }
    }
    Ok(Loaded { dataset, skipped })
}

fn parse_row(
    rec: &csv::StringRecord,
    id_col: usize,
    source_col: Option<usize>,
    text_col: usize,
    label_col: usize,
) -> Result<LabeledComment, String> {
    let field = |c: usize| {
        rec.get(c)
            .ok_or_else(|| format!("expected at least {} fields, found {}", c + 1, rec.len()))
    };
    let id = field(id_col)?.to_string();
    let text = field(text_col)?.to_string();
    let label = Label::parse_cell(field(label_col)?).map_err(|e| e.to_string())?;
    let source = match source_col {
        Some(c) => field(c)?.to_string(),
        None => String::new(),
    };
    if label.is_some() && text.trim().is_empty() {
        return Err("labeled record has empty text".into());
    }
    Ok(LabeledComment {
        id,
        source,
        text,
        label,
    })
}

/// Writes records in the canonical `id,source,text,label` layout, with an
/// optional trailing column whose per-row values come from `extra`.
pub fn write_csv<W: Write>(
    writer: W,
    records: &[LabeledComment],
    extra: Option<(&str, &[String])>,
) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["id", "source", "text", "label"];
    if let Some((name, values)) = extra {
        assert_eq!(values.len(), records.len(), "extra column length mismatch");
        header.push(name);
    }
    w.write_record(&header)?;
    for (i, r) in records.iter().enumerate() {
        let label = r.label.map_or("", Label::as_str);
        match extra {
            Some((_, values)) => {
                w.write_record([&r.id, &r.source, &r.text, label, &values[i]])?
            }
            None => w.write_record([&r.id, &r.source, &r.text, label])?,
        }
    }
    w.flush()?;
    Ok(())
}
