//! Embedding → single-layer LSTM → dropout → dense classifier, with
//! hand-written backpropagation through time and Adam.
//!
//! Everything runs in `f64`. Gate blocks inside the LSTM weight matrices
//! are stacked in the order input, forget, cell candidate, output.

mod adam;
mod backward;
mod checkpoint;

use rand::Rng;
use thiserror::Error;

use crate::ingest::Label;
use crate::preprocess::{run_pipeline, PreprocessConfig};
use crate::vocab::{EncodedSequence, Vocabulary, PAD};

pub use adam::{adam_step, AdamState, BETA1, BETA2, EPSILON};
pub use backward::{backward, backward_with_masks, example_loss, DropoutMasks, Gradients};
pub use checkpoint::{Checkpoint, FORMAT_VERSION, MAGIC};

#[derive(Debug, Error)]
pub enum NnError {
    #[error("token index {index} out of range for vocabulary of size {vocab}")]
    IndexOutOfRange { index: u32, vocab: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("label {label} out of range for {classes} classes")]
    BadLabel { label: usize, classes: usize },
    #[error("non-finite values in {0}")]
    NonFinite(String),
    #[error("empty batch")]
    EmptyBatch,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("not a checkpoint file (bad magic bytes)")]
    BadMagic,
    #[error("checkpoint format version {found}, expected {expected}")]
    Version { found: u32, expected: u32 },
    #[error("checkpoint dimension mismatch: {0}")]
    Dimension(String),
    #[error("checkpoint truncated")]
    Truncated,
    #[error("checkpoint corrupt: {0}")]
    Corrupt(String),
}

/// Row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2 {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Tensor2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, NnError> {
        if data.len() != rows * cols {
            return Err(NnError::Shape(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// `out += self · x`
    fn matvec_acc(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *o += dot(row, x);
        }
    }

    /// `out += selfᵀ · y`
    fn matvec_t_acc(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        for (&yr, row) in y.iter().zip(self.data.chunks_exact(self.cols)) {
            if yr != 0.0 {
                axpy(yr, row, out);
            }
        }
    }

    /// `self += y ⊗ x`
    fn outer_acc(&mut self, y: &[f64], x: &[f64]) {
        for (&yr, row) in y.iter().zip(self.data.chunks_exact_mut(self.cols)) {
            if yr != 0.0 {
                axpy(yr, x, row);
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Model sizes: vocabulary, embedding, hidden, classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub vocab: usize,
    pub embed: usize,
    pub hidden: usize,
    pub classes: usize,
}

impl Dims {
    /// Embedding and hidden width 128, two classes.
    pub fn standard(vocab: usize) -> Self {
        Self {
            vocab,
            embed: 128,
            hidden: 128,
            classes: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    /// V×E; row 0 is the padding vector and stays zero.
    pub weights: Tensor2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmCell {
    /// 4H×E, gate blocks `[i, f, g, o]`.
    pub w_ih: Tensor2,
    /// 4H×H
    pub w_hh: Tensor2,
    pub b_ih: Vec<f64>,
    pub b_hh: Vec<f64>,
}

impl LstmCell {
    pub fn zeros(embed: usize, hidden: usize) -> Self {
        Self {
            w_ih: Tensor2::zeros(4 * hidden, embed),
            w_hh: Tensor2::zeros(4 * hidden, hidden),
            b_ih: vec![0.0; 4 * hidden],
            b_hh: vec![0.0; 4 * hidden],
        }
    }

    pub fn hidden(&self) -> usize {
        self.w_hh.cols()
    }

    pub fn input(&self) -> usize {
        self.w_ih.cols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden: usize) -> Self {
        Self {
            h: vec![0.0; hidden],
            c: vec![0.0; hidden],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    /// C×H
    pub w: Tensor2,
    pub b: Vec<f64>,
}

pub const DEFAULT_LSTM_DROPOUT: f64 = 0.3;
pub const DEFAULT_FC_DROPOUT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub embedding: Embedding,
    pub lstm: LstmCell,
    pub dense: Dense,
    /// Dropout on the final hidden state, applied only when
    /// `lstm_dropout_enabled` is set (off by default).
    pub lstm_dropout: f64,
    pub lstm_dropout_enabled: bool,
    pub fc_dropout: f64,
}

/// Names of the parameter arrays in their fixed storage order.
pub const PARAM_NAMES: [&str; 7] = [
    "embedding",
    "lstm.w_ih",
    "lstm.w_hh",
    "lstm.b_ih",
    "lstm.b_hh",
    "dense.w",
    "dense.b",
];

impl ModelParams {
    pub fn zeros(d: Dims) -> Self {
        Self {
            embedding: Embedding {
                weights: Tensor2::zeros(d.vocab, d.embed),
            },
            lstm: LstmCell::zeros(d.embed, d.hidden),
            dense: Dense {
                w: Tensor2::zeros(d.classes, d.hidden),
                b: vec![0.0; d.classes],
            },
            lstm_dropout: DEFAULT_LSTM_DROPOUT,
            lstm_dropout_enabled: false,
            fc_dropout: DEFAULT_FC_DROPOUT,
        }
    }

    /// Weights uniform in ±1/√H, embedding in ±1/√E with a zero pad row,
    /// biases zero.
    pub fn init<R: Rng + ?Sized>(d: Dims, rng: &mut R) -> Self {
        let mut p = Self::zeros(d);
        let ke = 1.0 / (d.embed as f64).sqrt();
        let kh = 1.0 / (d.hidden as f64).sqrt();
        let mut fill = |t: &mut Tensor2, k: f64| {
            for x in t.as_mut_slice() {
                *x = rng.random_range(-k..k);
            }
        };
        fill(&mut p.embedding.weights, ke);
        fill(&mut p.lstm.w_ih, kh);
        fill(&mut p.lstm.w_hh, kh);
        fill(&mut p.dense.w, kh);
        if d.vocab > 0 {
            p.embedding.weights.row_mut(PAD as usize).fill(0.0);
        }
        p
    }

    pub fn dims(&self) -> Dims {
        Dims {
            vocab: self.embedding.weights.rows(),
            embed: self.embedding.weights.cols(),
            hidden: self.lstm.hidden(),
            classes: self.dense.w.rows(),
        }
    }

    pub fn arrays(&self) -> [&[f64]; 7] {
        [
            self.embedding.weights.as_slice(),
            self.lstm.w_ih.as_slice(),
            self.lstm.w_hh.as_slice(),
            &self.lstm.b_ih,
            &self.lstm.b_hh,
            self.dense.w.as_slice(),
            &self.dense.b,
        ]
    }

    pub fn arrays_mut(&mut self) -> [&mut [f64]; 7] {
        [
            self.embedding.weights.as_mut_slice(),
            self.lstm.w_ih.as_mut_slice(),
            self.lstm.w_hh.as_mut_slice(),
            &mut self.lstm.b_ih,
            &mut self.lstm.b_hh,
            self.dense.w.as_mut_slice(),
            &mut self.dense.b,
        ]
    }

    /// Direct count of every stored weight.
    pub fn num_parameters(&self) -> u64 {
        self.arrays().iter().map(|a| a.len() as u64).sum()
    }

    /// Checks every array has the shape implied by [`ModelParams::dims`].
    pub fn validate(&self) -> Result<(), NnError> {
        let d = self.dims();
        let expect = expected_lengths(d);
        for ((name, a), n) in PARAM_NAMES.iter().zip(self.arrays()).zip(expect) {
            if a.len() != n {
                return Err(NnError::Shape(format!("{name} has {} values, expected {n}", a.len())));
            }
        }
        if self.lstm.w_ih.rows() != 4 * d.hidden || self.dense.w.cols() != d.hidden {
            return Err(NnError::Shape("layer widths disagree".into()));
        }
        Ok(())
    }
}

pub(crate) fn expected_lengths(d: Dims) -> [usize; 7] {
    let h4 = 4 * d.hidden;
    [
        d.vocab * d.embed,
        h4 * d.embed,
        h4 * d.hidden,
        h4,
        h4,
        d.classes * d.hidden,
        d.classes,
    ]
}

/// Closed-form parameter count of the double-bias LSTM classifier.
pub fn count_parameters(v: u64, e: u64, h: u64, c: u64) -> u64 {
    v * e + 4 * (e * h + h * h + 2 * h) + (h * c + c)
}

/// Embedding rows for `indices`, in order.
pub fn embed_forward(indices: &[u32], emb: &Embedding) -> Result<Vec<Vec<f64>>, NnError> {
    let v = emb.weights.rows();
    indices
        .iter()
        .map(|&i| {
            if (i as usize) < v {
                Ok(emb.weights.row(i as usize).to_vec())
            } else {
                Err(NnError::IndexOutOfRange { index: i, vocab: v })
            }
        })
        .collect()
}

/// Gate activations `[i, f, g, o]` for one step.
fn gate_activations(x: &[f64], h: &[f64], cell: &LstmCell) -> Vec<f64> {
    let hd = cell.hidden();
    let mut z: Vec<f64> = cell.b_ih.iter().zip(&cell.b_hh).map(|(a, b)| a + b).collect();
    cell.w_ih.matvec_acc(x, &mut z);
    cell.w_hh.matvec_acc(h, &mut z);
    for (k, v) in z.iter_mut().enumerate() {
        *v = if (2 * hd..3 * hd).contains(&k) {
            v.tanh()
        } else {
            sigmoid(*v)
        };
    }
    z
}

fn check_step_shapes(x: &[f64], s: &LstmState, cell: &LstmCell) -> Result<(), NnError> {
    let hd = cell.hidden();
    if x.len() != cell.input() || s.h.len() != hd || s.c.len() != hd {
        return Err(NnError::Shape(format!(
            "lstm step got x:{} h:{} c:{} for E={} H={hd}",
            x.len(),
            s.h.len(),
            s.c.len(),
            cell.input()
        )));
    }
    Ok(())
}

/// One LSTM step: `c' = f⊙c + i⊙g`, `h' = o⊙tanh(c')`.
pub fn lstm_step(x: &[f64], s: &LstmState, cell: &LstmCell) -> Result<LstmState, NnError> {
    check_step_shapes(x, s, cell)?;
    let a = gate_activations(x, &s.h, cell);
    Ok(next_state(&a, &s.c))
}

fn next_state(a: &[f64], c_prev: &[f64]) -> LstmState {
    let hd = c_prev.len();
    let (i, f, g, o) = (&a[..hd], &a[hd..2 * hd], &a[2 * hd..3 * hd], &a[3 * hd..]);
    let c: Vec<f64> = (0..hd).map(|k| f[k] * c_prev[k] + i[k] * g[k]).collect();
    let h = (0..hd).map(|k| o[k] * c[k].tanh()).collect();
    LstmState { h, c }
}

/// Runs the first `true_length` positions from the zero state and returns
/// the state at the last real token. `true_length == 0` yields the zero
/// state.
pub fn lstm_forward(vecs: &[Vec<f64>], true_length: usize, cell: &LstmCell) -> Result<LstmState, NnError> {
    if true_length > vecs.len() {
        return Err(NnError::Shape(format!(
            "true_length {true_length} exceeds sequence length {}",
            vecs.len()
        )));
    }
    let mut s = LstmState::zeros(cell.hidden());
    for x in &vecs[..true_length] {
        s = lstm_step(x, &s, cell)?;
    }
    Ok(s)
}

/// Inverted-dropout keep mask: each entry is 0 with probability `rate`,
/// otherwise `1/(1-rate)`.
pub fn dropout_mask<R: Rng + ?Sized>(n: usize, rate: f64, rng: &mut R) -> Vec<f64> {
    assert!((0.0..1.0).contains(&rate), "dropout rate {rate} outside [0, 1)");
    if rate == 0.0 {
        return vec![1.0; n];
    }
    let scale = 1.0 / (1.0 - rate);
    (0..n)
        .map(|_| if rng.random::<f64>() < rate { 0.0 } else { scale })
        .collect()
}

/// Identity at inference; inverted dropout in training.
pub fn dropout<R: Rng + ?Sized>(x: &[f64], rate: f64, training: bool, rng: &mut R) -> Vec<f64> {
    if !training || rate == 0.0 {
        return x.to_vec();
    }
    let m = dropout_mask(x.len(), rate, rng);
    x.iter().zip(&m).map(|(a, b)| a * b).collect()
}

pub fn dense_forward(h: &[f64], d: &Dense) -> Result<Vec<f64>, NnError> {
    if h.len() != d.w.cols() || d.b.len() != d.w.rows() {
        return Err(NnError::Shape(format!(
            "dense layer {}x{} applied to {} inputs",
            d.w.rows(),
            d.w.cols(),
            h.len()
        )));
    }
    let mut out = d.b.clone();
    d.w.matvec_acc(h, &mut out);
    Ok(out)
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|z| (z - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

fn log_sum_exp(logits: &[f64]) -> f64 {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + logits.iter().map(|z| (z - m).exp()).sum::<f64>().ln()
}

/// Softmax cross-entropy and its gradient with respect to the logits.
pub fn cross_entropy(logits: &[f64], label: usize) -> Result<(f64, Vec<f64>), NnError> {
    if label >= logits.len() {
        return Err(NnError::BadLabel {
            label,
            classes: logits.len(),
        });
    }
    let loss = (log_sum_exp(logits) - logits[label]).max(0.0);
    let mut grad = softmax(logits);
    grad[label] -= 1.0;
    Ok((loss, grad))
}

/// Inference-mode logits for one encoded sequence.
pub fn forward_logits(seq: &EncodedSequence, p: &ModelParams) -> Result<Vec<f64>, NnError> {
    let x = embed_forward(&seq.indices[..seq.true_length.min(seq.indices.len())], &p.embedding)?;
    let s = lstm_forward(&x, x.len(), &p.lstm)?;
    dense_forward(&s.h, &p.dense)
}

/// Argmax with ties going to the lower class index (Negative).
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: Label,
    /// Indexed by [`Label::index`].
    pub probabilities: [f64; 2],
    /// Set when nothing survived preprocessing and the answer comes from
    /// the zero-state forward pass.
    pub low_confidence: bool,
}

pub fn predict_encoded(seq: &EncodedSequence, p: &ModelParams) -> Result<Prediction, NnError> {
    let probs = softmax(&forward_logits(seq, p)?);
    if probs.len() != Label::COUNT {
        return Err(NnError::Shape(format!("{} classes, expected 2", probs.len())));
    }
    Ok(Prediction {
        label: Label::from_index(argmax(&probs)).unwrap_or(Label::Negative),
        probabilities: [probs[0], probs[1]],
        low_confidence: seq.true_length == 0,
    })
}

/// Full pipeline, encoding, inference-mode forward pass and argmax.
pub fn predict(
    text: &str,
    p: &ModelParams,
    vocab: &Vocabulary,
    cfg: &PreprocessConfig,
) -> Result<Prediction, NnError> {
    let tokens = run_pipeline(text, cfg);
    let mut pred = predict_encoded(&vocab.encode(&tokens), p)?;
    if tokens.is_empty() {
        // nothing to classify: report the model's prior but never claim
        // the positive class on no evidence
        pred.label = Label::Negative;
        pred.low_confidence = true;
    }
    Ok(pred)
}
