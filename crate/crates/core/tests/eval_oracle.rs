use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sentimen::eval::{
    read_report_csv, render_text, report, report_from_confusion, round2, write_report_csv, ConfusionMatrix,
};
use sentimen::ingest::stratified_split;
use sentimen::{Dataset, Label, LabeledComment, SplitSpec};

/// Precision, recall, F1 and support for `class`, counted sample by sample.
fn recount(preds: &[Label], truth: &[Label], class: Label) -> [f64; 4] {
    let mut hit = 0.0;
    let mut predicted = 0.0;
    let mut actual = 0.0;
    for (p, t) in preds.iter().zip(truth) {
        if *p == class {
            predicted += 1.0;
        }
        if *t == class {
            actual += 1.0;
            if p == t {
                hit += 1.0;
            }
        }
    }
    let div = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
    let (pr, rc) = (div(hit, predicted), div(hit, actual));
    [pr, rc, div(2.0 * pr * rc, pr + rc), actual]
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

#[test]
fn report_equals_per_sample_recount() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..1000 {
        let n = rng.random_range(1..200);
        // skewed rates so that empty classes and zero divisions show up
        let bias = rng.random_range(0.0..1.0);
        let acc = rng.random_range(0.0..1.0);
        let truth: Vec<Label> = (0..n)
            .map(|_| if rng.random_bool(bias) { Label::Positive } else { Label::Negative })
            .collect();
        let preds: Vec<Label> = truth
            .iter()
            .map(|&t| {
                if rng.random_bool(acc) {
                    t
                } else {
                    Label::from_index(1 - t.index()).unwrap()
                }
            })
            .collect();
        let r = report(&preds, &truth).unwrap();
        let oracle = Label::ALL.map(|l| recount(&preds, &truth, l));
        for (l, o) in Label::ALL.iter().zip(&oracle) {
            let m = r.class(*l);
            assert!(close(m.precision, o[0]) && close(m.recall, o[1]) && close(m.f1, o[2]), "case {case} {l:?}");
            assert_eq!(m.support as f64, o[3]);
        }
        let correct = preds.iter().zip(&truth).filter(|(p, t)| p == t).count() as f64;
        assert!(close(r.accuracy, correct / n as f64));
        let mean = |k: usize| (oracle[0][k] + oracle[1][k]) / 2.0;
        let weighted = |k: usize| (oracle[0][k] * oracle[0][3] + oracle[1][k] * oracle[1][3]) / n as f64;
        assert!(close(r.macro_avg.precision, mean(0)) && close(r.macro_avg.recall, mean(1)) && close(r.macro_avg.f1, mean(2)));
        assert!(
            close(r.weighted_avg.precision, weighted(0))
                && close(r.weighted_avg.recall, weighted(1))
                && close(r.weighted_avg.f1, weighted(2))
        );
        let mut csv = Vec::new();
        write_report_csv(&mut csv, &r).unwrap();
        assert_eq!(read_report_csv(csv.as_slice()).unwrap(), r);
    }
}

#[test]
fn published_confusion_matrix_gives_published_table() {
    let cm = ConfusionMatrix { tp: 67, fn_: 51, fp: 58, tn: 787 };
    let r = report_from_confusion(&cm).unwrap();
    let row = |p: f64, rc: f64, f: f64| [round2(p), round2(rc), round2(f)];
    let neg = r.class(Label::Negative);
    let pos = r.class(Label::Positive);
    assert_eq!(round2(r.accuracy), 0.89);
    assert_eq!(row(neg.precision, neg.recall, neg.f1), [0.94, 0.93, 0.94]);
    assert_eq!(row(pos.precision, pos.recall, pos.f1), [0.54, 0.57, 0.55]);
    assert_eq!(row(r.macro_avg.precision, r.macro_avg.recall, r.macro_avg.f1), [0.74, 0.75, 0.74]);
    assert_eq!(row(r.weighted_avg.precision, r.weighted_avg.recall, r.weighted_avg.f1), [0.89, 0.89, 0.89]);
    assert_eq!((neg.support, pos.support, r.total), (845, 118, 963));
    let text = render_text(&r);
    assert!(text.contains("    accuracy                          0.89       963"), "{text}");
}

fn synthetic(neg: usize, pos: usize) -> Dataset {
    let records = (0..neg + pos)
        .map(|i| {
            let l = if i < neg { Label::Negative } else { Label::Positive };
            LabeledComment::new(format!("c{i}"), format!("teks {i}"), Some(l))
        })
        .collect();
    Dataset::new(records)
}

#[test]
fn split_shape_matches_published_supports() {
    let ds = synthetic(5629, 790);
    for seed in [42, 7, 1234] {
        let s = stratified_split(&ds, &SplitSpec::new(0.70, 0.15, 0.15, seed).unwrap()).unwrap();
        let c = s.test.counts();
        assert!(s.test.len().abs_diff(963) <= 1, "{}", s.test.len());
        assert!(c.get(Label::Negative).abs_diff(845) <= 1);
        assert!(c.get(Label::Positive).abs_diff(118) <= 1);
        assert_eq!(s.train.len() + s.val.len() + s.test.len(), ds.len());
        let mut ids: Vec<&str> = [&s.train, &s.val, &s.test]
            .iter()
            .flat_map(|d| d.records().iter().map(|r| r.id.as_str()))
            .collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), ds.len(), "splits overlap");
    }
}
