//! Agreement with reference implementations: fixtures produced by
//! scripts/build_model_golden.py from scikit-learn and torch.

use serde_json::Value;
use sentimen::baselines::{linear_fit, logistic_objective, LinearConfig, NaiveBayesModel, TfidfVectorizer};
use sentimen::nn::{backward, forward_logits, Dims, ModelParams};
use sentimen::{EncodedSequence, Label, TokenList};

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn docs(v: &Value) -> Vec<TokenList> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|d| d.as_array().unwrap().iter().map(|t| t.as_str().unwrap().to_string()).collect())
        .collect()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn labels(v: &Value) -> Vec<Label> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| Label::from_index(x.as_u64().unwrap() as usize).unwrap())
        .collect()
}

fn dense(x: &[(usize, f64)], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for &(i, v) in x {
        out[i] = v;
    }
    out
}

#[test]
fn tfidf_naive_bayes_and_logistic_match_sklearn() {
    let g = json(include_str!("data/sklearn_golden.json"));
    let train = docs(&g["train"]);
    let ytr = labels(&g["train_labels"]);
    let test = docs(&g["test"]);

    let tf = TfidfVectorizer::fit(&train);
    let terms: Vec<&str> = g["terms"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
    assert_eq!(tf.terms(), terms);
    for (a, b) in tf.idf().iter().zip(floats(&g["idf"])) {
        assert!((a - b).abs() < 1e-12);
    }
    for (doc, row) in test.iter().zip(g["tfidf_test"].as_array().unwrap()) {
        for (a, b) in dense(&tf.transform(doc), tf.len()).iter().zip(floats(row)) {
            assert!((a - b).abs() < 1e-12, "{doc:?}");
        }
    }

    let counts: Vec<_> = train.iter().map(|d| tf.counts(d)).collect();
    let nb = NaiveBayesModel::fit(&counts, &ytr, tf.len());
    for (doc, row) in test.iter().zip(g["nb_proba_test"].as_array().unwrap()) {
        for (a, b) in nb.predict_proba(&tf.counts(doc)).iter().zip(floats(row)) {
            assert!((a - b).abs() < 1e-10, "{doc:?}");
        }
    }

    // gradient descent approaches the optimum found by sklearn's solver
    let lambda = g["lr_lambda"].as_f64().unwrap();
    let optimum = g["lr_objective"].as_f64().unwrap();
    let x: Vec<_> = train.iter().map(|d| tf.transform(d)).collect();
    let cfg = LinearConfig { lambda, epochs: 5000, ..LinearConfig::logistic() };
    let m = linear_fit(&x, &ytr, tf.len(), &cfg).unwrap();
    let ours = logistic_objective(&m, &x, &ytr, lambda);
    assert!(ours >= optimum - 1e-9, "{ours} below optimum {optimum}");
    assert!(ours - optimum < 1e-6, "{ours} vs {optimum}");
}

#[test]
fn lstm_logits_loss_and_gradients_match_torch() {
    let cases = json(include_str!("data/torch_lstm_golden.json"));
    for (k, c) in cases.as_array().unwrap().iter().enumerate() {
        let d = floats(&c["dims"]).iter().map(|&x| x as usize).collect::<Vec<_>>();
        let mut p = ModelParams::zeros(Dims { vocab: d[0], embed: d[1], hidden: d[2], classes: d[3] });
        for (dst, src) in p.arrays_mut().into_iter().zip(c["params"].as_array().unwrap()) {
            dst.copy_from_slice(&floats(src));
        }
        let seqs: Vec<EncodedSequence> = c["seqs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| {
                let indices: Vec<u32> = floats(s).iter().map(|&x| x as u32).collect();
                let true_length = indices.len();
                EncodedSequence { indices, true_length }
            })
            .collect();
        let ys: Vec<usize> = floats(&c["labels"]).iter().map(|&x| x as usize).collect();
        for (s, z) in seqs.iter().zip(c["logits"].as_array().unwrap()) {
            for (a, b) in forward_logits(s, &p).unwrap().iter().zip(floats(z)) {
                assert!((a - b).abs() < 1e-12, "case {k}");
            }
        }
        let batch: Vec<_> = seqs.iter().zip(ys.iter().copied()).collect();
        let (loss, g) = backward(&batch, &p, None, false, &mut rand::rng()).unwrap();
        assert!((loss - c["loss"].as_f64().unwrap()).abs() < 1e-12, "case {k}");
        for (a, b) in g.arrays().iter().zip(c["grads"].as_array().unwrap()) {
            let b = floats(b);
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12, "case {k}: {x} vs {y}");
            }
        }
    }
}
