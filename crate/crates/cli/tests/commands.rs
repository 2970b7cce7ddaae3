mod common;

use std::fs;
use std::path::Path;

use common::{comment_page, data, sentimen, MockServer, SMALL};
use sentimen::eval::read_report_csv;

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn with_small<'a>(args: &[&'a str]) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend_from_slice(SMALL);
    v
}

#[test]
fn preprocess_matches_golden_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tok.csv");
    let corpus = data("toy_corpus.csv");
    let r = sentimen(
        &["preprocess", "--input", p(&corpus), "--output", p(&out), "--out-dir", p(dir.path())],
        None,
        &[],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(fs::read_to_string(&out).unwrap(), fs::read_to_string(data("toy_preprocessed.csv")).unwrap());
    assert!(dir.path().join("config.resolved.txt").exists());
}

#[test]
fn preprocess_empty_corpus_and_missing_dictionary() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "id,source,text,label\n").unwrap();
    let out = dir.path().join("o.csv");
    let r = sentimen(&["preprocess", "--input", p(&empty), "--output", p(&out), "--out-dir", p(dir.path())], None, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(fs::read_to_string(&out).unwrap(), "id,source,text,label,tokens\n");

    let missing = dir.path().join("no_such_slang.tsv");
    let r = sentimen(
        &["preprocess", "--input", p(&empty), "--slang", p(&missing), "--out-dir", p(dir.path())],
        None,
        &[],
    );
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("no_such_slang.tsv"), "{}", r.stderr);
}

#[test]
fn train_writes_all_artifacts_and_is_deterministic() {
    let corpus = data("toy_corpus.csv");
    let run = |dir: &Path| {
        let args = with_small(&["train", "--input", p(&corpus), "--epochs", "3", "--out-dir", p(dir), "--quiet"]);
        let r = sentimen(&args, None, &[]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert!(r.stderr.is_empty(), "quiet run printed: {}", r.stderr);
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(a.path());
    run(b.path());
    for f in [
        "config.resolved.txt",
        "history.csv",
        "loss_curve.svg",
        "accuracy_curve.svg",
        "model.ckpt",
        "model_best.ckpt",
        "vocab.txt",
        "vocab.txt.meta",
        "train.csv",
        "val.csv",
        "test.csv",
    ] {
        assert!(a.path().join(f).exists(), "{f} missing");
    }
    let history = fs::read_to_string(a.path().join("history.csv")).unwrap();
    assert_eq!(history.lines().count(), 4);
    assert!(history.starts_with("epoch,train_loss,train_acc,val_loss,val_acc\n"));
    for f in ["history.csv", "model.ckpt", "loss_curve.svg", "test.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
    // unlabeled rows never reach the splits
    let n: usize = ["train.csv", "val.csv", "test.csv"]
        .iter()
        .map(|f| fs::read_to_string(a.path().join(f)).unwrap().lines().count() - 1)
        .sum();
    assert_eq!(n, 72);
}

#[test]
fn zero_epochs_warns_and_writes_empty_history() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = data("toy_corpus.csv");
    let args = with_small(&["train", "--input", p(&corpus), "--epochs", "0", "--out-dir", p(dir.path())]);
    let r = sentimen(&args, None, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stderr.contains("warning: train.epochs is 0"), "{}", r.stderr);
    assert_eq!(
        fs::read_to_string(dir.path().join("history.csv")).unwrap(),
        "epoch,train_loss,train_acc,val_loss,val_acc\n"
    );
    assert!(dir.path().join("model.ckpt").exists());
    assert!(!dir.path().join("model_best.ckpt").exists());
}

#[test]
fn lstm_dropout_is_announced() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = data("toy_corpus.csv");
    let mut args = with_small(&["train", "--input", p(&corpus), "--epochs", "1", "--out-dir", p(dir.path())]);
    args.extend(["--set", "model.lstm_dropout_enabled=true"]);
    let r = sentimen(&args, None, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stderr.contains("warning: dropout 0.3 on the LSTM output"), "{}", r.stderr);
}

fn paper_predictions(path: &Path) {
    let mut s = String::from("label,predicted\n");
    for (label, pred, n) in [
        ("positive", "positive", 67),
        ("positive", "negative", 51),
        ("negative", "positive", 58),
        ("negative", "negative", 787),
    ] {
        for _ in 0..n {
            s.push_str(&format!("{label},{pred}\n"));
        }
    }
    fs::write(path, s).unwrap();
}

#[test]
fn evaluate_published_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let preds = dir.path().join("preds.csv");
    paper_predictions(&preds);
    let r = sentimen(&["evaluate", "--predictions", p(&preds), "--out-dir", p(dir.path())], None, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let expected = "             precision    recall  f1-score   support

    Negative      0.94      0.93      0.94       845
    Positive      0.54      0.57      0.55       118

    accuracy                          0.89       963
   macro avg      0.74      0.75      0.74       963
weighted avg      0.89      0.89      0.89       963
";
    assert_eq!(fs::read_to_string(dir.path().join("report.txt")).unwrap(), expected);
    assert_eq!(r.stdout, expected);
    let back = read_report_csv(fs::File::open(dir.path().join("report.csv")).unwrap()).unwrap();
    assert_eq!(back.total, 963);
    assert!((back.accuracy - 854.0 / 963.0).abs() < 1e-15);
    assert_eq!(
        fs::read_to_string(dir.path().join("confusion.csv")).unwrap(),
        "actual\\predicted,negative,positive\nnegative,787,58\npositive,51,67\n"
    );
    assert!(fs::read_to_string(dir.path().join("confusion.svg")).unwrap().contains(">787</text>"));
}

#[test]
fn evaluate_rejects_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let preds = dir.path().join("preds.csv");
    fs::write(&preds, "label,predicted\n").unwrap();
    let r = sentimen(&["evaluate", "--predictions", p(&preds), "--out-dir", p(dir.path())], None, &[]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    let r = sentimen(&["evaluate", "--out-dir", p(dir.path())], None, &[]);
    assert_eq!(r.code, 2);
}

/// Trains long enough to memorize the training split.
fn overfit(dir: &Path) {
    let corpus = data("toy_corpus.csv");
    let mut args = with_small(&["train", "--input", p(&corpus), "--epochs", "60", "--out-dir", p(dir), "--quiet"]);
    args.extend(["--set", "split.train=0.8", "--set", "split.val=0.2", "--set", "split.test=0"]);
    let r = sentimen(&args, None, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let last = fs::read_to_string(dir.join("history.csv")).unwrap();
    let acc: f64 = last.lines().last().unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(acc, 1.0, "{last}");
}

#[test]
fn predict_and_evaluate_a_trained_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    overfit(dir.path());
    let ckpt = dir.path().join("model.ckpt");
    let train_csv = fs::read_to_string(dir.path().join("train.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(train_csv.as_bytes());
    let positive: String = rdr
        .records()
        .map(|r| r.unwrap())
        .find(|r| &r[3] == "positive")
        .map(|r| r[2].to_string())
        .unwrap();

    let r = sentimen(&["predict", "--checkpoint", p(&ckpt), "--text", &positive, "--out-dir", p(dir.path())], None, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (label, prob) = r.stdout.trim().split_once(' ').unwrap();
    assert_eq!(label, "positive");
    assert!(prob.parse::<f64>().unwrap() > 0.9, "{}", r.stdout);

    let stdin = format!("{positive}\n\n!!! 123\n");
    let r = sentimen(&["predict", "--checkpoint", p(&ckpt), "--out-dir", p(dir.path())], Some(&stdin), &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("positive "));
    assert_eq!(lines[1], "negative (low-confidence: empty after preprocessing)");
    assert_eq!(lines[2], lines[1]);

    let r = sentimen(
        &["evaluate", "--checkpoint", p(&ckpt), "--input", p(&dir.path().join("train.csv")), "--out-dir", p(dir.path()), "-q"],
        None,
        &[],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report = read_report_csv(fs::File::open(dir.path().join("report.csv")).unwrap()).unwrap();
    assert_eq!(report.accuracy, 1.0);
    let preds = fs::read_to_string(dir.path().join("predictions.csv")).unwrap();
    assert!(preds.starts_with("id,label,predicted,p_positive\n"));
}

#[test]
fn predict_errors() {
    let dir = tempfile::tempdir().unwrap();
    let r = sentimen(
        &["predict", "--checkpoint", p(&dir.path().join("nope.ckpt")), "--text", "x", "--out-dir", p(dir.path())],
        None,
        &[],
    );
    assert_eq!(r.code, 2);
    let junk = dir.path().join("junk.ckpt");
    fs::write(&junk, b"not a checkpoint").unwrap();
    let r = sentimen(&["predict", "--checkpoint", p(&junk), "--text", "x", "--out-dir", p(dir.path())], None, &[]);
    assert_eq!(r.code, 2, "{}", r.stderr);
}

fn separable_corpus(path: &Path) {
    let mut s = String::from("id,source,text,label\n");
    let filler = ["anak", "sekolah", "menu", "siang", "program"];
    for i in 0..60 {
        let (word, label) = if i % 3 == 0 { ("lezat", "positive") } else { ("basi", "negative") };
        s.push_str(&format!("c{i},v,{} {word} {},{label}\n", filler[i % 5], filler[(i / 5) % 5]));
    }
    fs::write(path, s).unwrap();
}

#[test]
fn compare_on_separable_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("sep.csv");
    separable_corpus(&corpus);
    let args = with_small(&["compare", "--input", p(&corpus), "--out-dir", p(dir.path()), "--set", "train.epochs=30"]);
    let r = sentimen(&args, None, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let csv = fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("model,accuracy,macro_f1"));
    let rows: Vec<(String, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].parse().unwrap())
        })
        .collect();
    let names: Vec<&str> = rows.iter().map(|r| r.0.as_str()).collect();
    assert_eq!(names, ["majority", "naive_bayes", "logistic_regression", "linear_svm", "lstm"]);
    for (name, acc) in &rows[1..] {
        assert!(*acc >= rows[0].1, "{name} {acc} below majority {}", rows[0].1);
    }
    assert_eq!(r.stdout, fs::read_to_string(dir.path().join("comparison.txt")).unwrap());
}

#[test]
fn compare_keeps_lstm_row_without_baselines() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("sep.csv");
    separable_corpus(&corpus);
    let mut args = with_small(&["compare", "--input", p(&corpus), "--out-dir", p(dir.path()), "-q"]);
    args.extend([
        "--set",
        "train.epochs=2",
        "--set",
        "compare.naive_bayes=false",
        "--set",
        "compare.logistic=false",
        "--set",
        "compare.svm=false",
    ]);
    let r = sentimen(&args, None, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let csv = fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    let names: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["majority", "lstm"]);
}

#[test]
fn fetch_writes_unlabeled_csv() {
    let dir = tempfile::tempdir().unwrap();
    let server = MockServer::start(vec![comment_page(&["a", "b", "c"], Some("P2")), comment_page(&["d", "e", "f"], None)]);
    let out = dir.path().join("c.csv");
    let r = sentimen(
        &["fetch", "--video", "vid9", "--max-pages", "5", "--output", p(&out), "--out-dir", p(dir.path()), "--set"],
        None,
        &[],
    );
    assert_eq!(r.code, 2, "--set needs a value");
    let base = format!("fetch.base_url={}", server.url);
    let r = sentimen(
        &["fetch", "--video", "vid9", "--max-pages", "5", "--output", p(&out), "--out-dir", p(dir.path()), "--set", &base],
        None,
        &[("YOUTUBE_API_KEY", "k3y-value")],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[0], "id,source,text,label");
    assert_eq!(lines[1], "a,vid9,\"komentar, a\",");
    assert!(lines[1..].iter().all(|l| l.ends_with(',')));
    assert_eq!(server.requests().len(), 2);
    for text in [&r.stdout, &r.stderr, &fs::read_to_string(dir.path().join("config.resolved.txt")).unwrap()] {
        assert!(!text.contains("k3y-value"));
    }
}

#[test]
fn fetch_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let unauthorized = r#"{"error":{"code":401,"message":"bad key","errors":[{"reason":"keyInvalid"}]}}"#;
    let server = MockServer::start(vec![(401, unauthorized.to_string())]);
    let base = format!("fetch.base_url={}", server.url);
    let args = ["fetch", "--video", "v", "--output", p(&out), "--out-dir", p(dir.path()), "--set", &base];
    let r = sentimen(&args, None, &[("YOUTUBE_API_KEY", "wrong")]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert!(!out.exists());
    assert!(!r.stderr.contains("wrong"));

    let r = sentimen(&args, None, &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("YOUTUBE_API_KEY"));

    let r = sentimen(
        &["fetch", "--video", "v", "--max-pages", "0", "--output", p(&out), "--out-dir", p(dir.path()), "--set", &base],
        None,
        &[("YOUTUBE_API_KEY", "k")],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(fs::read_to_string(&out).unwrap(), "id,source,text,label\n");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# test config\nseed = 5\ntrain.epochs = 7\n").unwrap();
    let empty = dir.path().join("e.csv");
    fs::write(&empty, "id,source,text,label\n").unwrap();
    let r = sentimen(
        &["preprocess", "--config", p(&cfg), "--seed", "9", "--input", p(&empty), "--out-dir", p(dir.path()), "-q"],
        None,
        &[],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let echoed = fs::read_to_string(dir.path().join("config.resolved.txt")).unwrap();
    assert!(echoed.contains("\nseed = 9\n"));
    assert!(echoed.contains("\ntrain.epochs = 7\n"));

    fs::write(&cfg, "train.epochz = 7\n").unwrap();
    let r = sentimen(&["preprocess", "--config", p(&cfg), "--input", p(&empty), "--out-dir", p(dir.path())], None, &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("train.epochz"), "{}", r.stderr);

    let r = sentimen(&["train", "--input", p(&dir.path().join("missing.csv")), "--out-dir", p(dir.path())], None, &[]);
    assert_eq!(r.code, 2);
}
