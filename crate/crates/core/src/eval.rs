//! Confusion matrix, per-class precision/recall/F1 and the classification
//! report, with Positive as the reference class of the raw matrix.

use std::fmt::Write as _;
use std::io::{Read, Write};

use thiserror::Error;

use crate::ingest::Label;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{preds} predictions but {truth} true labels")]
    LengthMismatch { preds: usize, truth: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("report csv: {0}")]
    Parse(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    /// Positive predicted positive.
    pub tp: u64,
    /// Negative predicted positive.
    pub fp: u64,
    /// Negative predicted negative.
    pub tn: u64,
    /// Positive predicted negative.
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// The same matrix with Negative as the reference class.
    pub fn relabeled(&self) -> Self {
        Self {
            tp: self.tn,
            fp: self.fn_,
            tn: self.tp,
            fn_: self.fp,
        }
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total()).0
    }

    /// `[[tn, fp], [fn, tp]]`: rows are true labels, columns predictions,
    /// both in [`Label::index`] order.
    pub fn as_grid(&self) -> [[u64; 2]; 2] {
        [[self.tn, self.fp], [self.fn_, self.tp]]
    }
}

pub fn confusion(preds: &[Label], truth: &[Label]) -> Result<ConfusionMatrix, EvalError> {
    if preds.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            preds: preds.len(),
            truth: truth.len(),
        });
    }
    if preds.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut cm = ConfusionMatrix::default();
    for (p, t) in preds.iter().zip(truth) {
        match (t, p) {
            (Label::Positive, Label::Positive) => cm.tp += 1,
            (Label::Positive, Label::Negative) => cm.fn_ += 1,
            (Label::Negative, Label::Positive) => cm.fp += 1,
            (Label::Negative, Label::Negative) => cm.tn += 1,
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// A zero denominator was replaced by 0.
    pub zero_division: bool,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

pub fn metrics_for_class(cm: &ConfusionMatrix, reference: Label) -> ClassMetrics {
    let cm = match reference {
        Label::Positive => *cm,
        Label::Negative => cm.relabeled(),
    };
    let (precision, zp) = ratio(cm.tp, cm.tp + cm.fp);
    let (recall, zr) = ratio(cm.tp, cm.tp + cm.fn_);
    let (f1, zf) = if precision + recall == 0.0 {
        (0.0, true)
    } else {
        (2.0 * precision * recall / (precision + recall), false)
    };
    ClassMetrics {
        precision,
        recall,
        f1,
        support: cm.tp + cm.fn_,
        zero_division: zp || zr || zf,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    /// Indexed by [`Label::index`].
    pub per_class: [ClassMetrics; 2],
    pub accuracy: f64,
    pub macro_avg: Averages,
    pub weighted_avg: Averages,
    pub total: u64,
}

impl ClassificationReport {
    pub fn class(&self, l: Label) -> &ClassMetrics {
        &self.per_class[l.index()]
    }

    pub fn zero_division(&self) -> bool {
        self.per_class.iter().any(|m| m.zero_division)
    }
}

pub fn report(preds: &[Label], truth: &[Label]) -> Result<ClassificationReport, EvalError> {
    report_from_confusion(&confusion(preds, truth)?)
}

pub fn report_from_confusion(cm: &ConfusionMatrix) -> Result<ClassificationReport, EvalError> {
    if cm.total() == 0 {
        return Err(EvalError::Empty);
    }
    let per_class = Label::ALL.map(|l| metrics_for_class(cm, l));
    let total = cm.total();
    let n = Label::COUNT as f64;
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / n;
    let wmean = |f: fn(&ClassMetrics) -> f64| {
        per_class.iter().map(|m| f(m) * m.support as f64).sum::<f64>() / total as f64
    };
    Ok(ClassificationReport {
        per_class,
        accuracy: cm.accuracy(),
        macro_avg: Averages {
            precision: mean(|m| m.precision),
            recall: mean(|m| m.recall),
            f1: mean(|m| m.f1),
        },
        weighted_avg: Averages {
            precision: wmean(|m| m.precision),
            recall: wmean(|m| m.recall),
            f1: wmean(|m| m.f1),
        },
        total,
    })
}

/// Rounds half away from zero to two decimals.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn fmt2(x: f64) -> String {
    format!("{:.2}", round2(x))
}

fn title(l: Label) -> &'static str {
    match l {
        Label::Negative => "Negative",
        Label::Positive => "Positive",
    }
}

/// Aligned text table in the familiar classification-report layout.
pub fn render_text(r: &ClassificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>12} {:>9} {:>9} {:>9} {:>9}", "", "precision", "recall", "f1-score", "support");
    let _ = writeln!(s);
    for l in Label::ALL {
        let m = r.class(l);
        let _ = writeln!(
            s,
            "{:>12} {:>9} {:>9} {:>9} {:>9}",
            title(l),
            fmt2(m.precision),
            fmt2(m.recall),
            fmt2(m.f1),
            m.support
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "{:>12} {:>9} {:>9} {:>9} {:>9}", "accuracy", "", "", fmt2(r.accuracy), r.total);
    for (name, a) in [("macro avg", &r.macro_avg), ("weighted avg", &r.weighted_avg)] {
        let _ = writeln!(
            s,
            "{:>12} {:>9} {:>9} {:>9} {:>9}",
            name,
            fmt2(a.precision),
            fmt2(a.recall),
            fmt2(a.f1),
            r.total
        );
    }
    if r.zero_division() {
        let _ = writeln!(s, "\nnote: some metrics had a zero denominator and were set to 0");
    }
    s
}

/// Full-precision CSV: `row,precision,recall,f1,support,zero_division`.
/// The last column is `0`/`1` on the class rows and empty elsewhere.
pub fn write_report_csv<W: Write>(w: W, r: &ClassificationReport) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["row", "precision", "recall", "f1", "support", "zero_division"])?;
    for l in Label::ALL {
        let m = r.class(l);
        w.write_record([
            l.as_str().to_string(),
            m.precision.to_string(),
            m.recall.to_string(),
            m.f1.to_string(),
            m.support.to_string(),
            u8::from(m.zero_division).to_string(),
        ])?;
    }
    w.write_record([
        "accuracy".into(),
        String::new(),
        String::new(),
        r.accuracy.to_string(),
        r.total.to_string(),
        String::new(),
    ])?;
    for (name, a) in [("macro_avg", &r.macro_avg), ("weighted_avg", &r.weighted_avg)] {
        w.write_record([
            name.to_string(),
            a.precision.to_string(),
            a.recall.to_string(),
            a.f1.to_string(),
            r.total.to_string(),
            String::new(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_report_csv`].
pub fn read_report_csv<R: Read>(r: R) -> Result<ClassificationReport, EvalError> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut rows = std::collections::HashMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let name = rec.get(0).unwrap_or_default().to_string();
        let num = |i: usize| -> Result<f64, EvalError> {
            let cell = rec.get(i).unwrap_or_default();
            if cell.is_empty() {
                return Ok(0.0);
            }
            cell.parse()
                .map_err(|_| EvalError::Parse(format!("row `{name}` column {i}: `{cell}`")))
        };
        rows.insert(name.clone(), [num(1)?, num(2)?, num(3)?, num(4)?, num(5)?]);
    }
    let get = |k: &str| rows.get(k).copied().ok_or_else(|| EvalError::Parse(format!("missing row `{k}`")));
    let class = |k: &str| -> Result<ClassMetrics, EvalError> {
        let v = get(k)?;
        Ok(ClassMetrics {
            precision: v[0],
            recall: v[1],
            f1: v[2],
            support: v[3] as u64,
            zero_division: v[4] != 0.0,
        })
    };
    let avg = |k: &str| -> Result<Averages, EvalError> {
        let v = get(k)?;
        Ok(Averages {
            precision: v[0],
            recall: v[1],
            f1: v[2],
        })
    };
    let acc = get("accuracy")?;
    Ok(ClassificationReport {
        per_class: [class("negative")?, class("positive")?],
        accuracy: acc[2],
        macro_avg: avg("macro_avg")?,
        weighted_avg: avg("weighted_avg")?,
        total: acc[3] as u64,
    })
}

/// 2×2 CSV, rows = true label, columns = predicted label.
pub fn write_confusion_csv<W: Write>(mut w: W, cm: &ConfusionMatrix) -> std::io::Result<()> {
    writeln!(w, "actual\\predicted,negative,positive")?;
    writeln!(w, "negative,{},{}", cm.tn, cm.fp)?;
    writeln!(w, "positive,{},{}", cm.fn_, cm.tp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Negative as N, Positive as P};

    fn paper_cm() -> ConfusionMatrix {
        ConfusionMatrix {
            tp: 67,
            fn_: 51,
            fp: 58,
            tn: 787,
        }
    }

    #[test]
    fn confusion_examples() {
        let cm = confusion(&[P, P, P], &[P, P, P]).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 3, ..Default::default() });
        let cm = confusion(&[N; 5], &[P, P, N, N, N]).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 0, fn_: 2, fp: 0, tn: 3 });
        assert!(matches!(confusion(&[N], &[]), Err(EvalError::LengthMismatch { .. })));
        assert!(matches!(confusion(&[], &[]), Err(EvalError::Empty)));
    }

    #[test]
    fn published_matrix_metrics() {
        let cm = paper_cm();
        let p = metrics_for_class(&cm, P);
        assert!((p.precision - 67.0 / 125.0).abs() < 1e-15);
        assert!((p.recall - 67.0 / 118.0).abs() < 1e-15);
        assert_eq!((round2(p.precision), round2(p.recall), round2(p.f1)), (0.54, 0.57, 0.55));
        let n = metrics_for_class(&cm, N);
        assert!((n.precision - 787.0 / 838.0).abs() < 1e-15);
        assert!((n.recall - 787.0 / 845.0).abs() < 1e-15);
        assert_eq!((round2(n.precision), round2(n.recall), round2(n.f1)), (0.94, 0.93, 0.94));
        let zero = metrics_for_class(&ConfusionMatrix { tn: 4, ..Default::default() }, P);
        assert_eq!((zero.precision, zero.recall, zero.f1), (0.0, 0.0, 0.0));
        assert!(zero.zero_division);
    }

    #[test]
    fn published_report_renders() {
        let r = report_from_confusion(&paper_cm()).unwrap();
        assert_eq!(r.total, 963);
        let text = render_text(&r);
        assert!(text.contains("    accuracy                          0.89       963"), "{text}");
        assert!(text.contains("   macro avg      0.74      0.75      0.74       963"), "{text}");
        assert!(text.contains("weighted avg      0.89      0.89      0.89       963"), "{text}");
        assert!(text.contains("    Negative      0.94      0.93      0.94       845"), "{text}");
        assert!(text.contains("    Positive      0.54      0.57      0.55       118"), "{text}");
        assert!(!text.contains("note:"));
    }

    #[test]
    fn perfect_predictions() {
        let r = report(&[P, N, N], &[P, N, N]).unwrap();
        for m in &r.per_class {
            assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        }
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.macro_avg.f1, 1.0);
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round2(0.125), 0.13);
        assert_eq!(round2(0.5), 0.5);
        assert_eq!(round2(-0.125), -0.13);
        assert_eq!(round2(0.8868), 0.89);
    }

    #[test]
    fn csv_round_trip() {
        let r = report_from_confusion(&paper_cm()).unwrap();
        let mut buf = Vec::new();
        write_report_csv(&mut buf, &r).unwrap();
        let back = read_report_csv(buf.as_slice()).unwrap();
        assert_eq!(back, r);
        let mut c = Vec::new();
        write_confusion_csv(&mut c, &paper_cm()).unwrap();
        assert_eq!(
            String::from_utf8(c).unwrap(),
            "actual\\predicted,negative,positive\nnegative,787,58\npositive,51,67\n"
        );
    }
}
