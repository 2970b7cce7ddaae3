//! Mini-batch training with per-epoch validation.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::ingest::Label;
use crate::nn::{
    adam_step, argmax, backward, cross_entropy, forward_logits, AdamState, Dims, ModelParams,
    NnError,
};
use crate::preprocess::TokenList;
use crate::vocab::{EncodedSequence, Vocabulary};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("{0} set is empty")]
    EmptySet(&'static str),
    #[error("{0} sequences but {1} labels")]
    Mismatch(usize, usize),
    #[error("epoch {epoch}, batch {batch}: {source}")]
    Batch {
        epoch: usize,
        batch: usize,
        #[source]
        source: NnError,
    },
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Per-class loss weights indexed by [`Label::index`].
    pub class_weights: Option<Vec<f64>>,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 16,
            learning_rate: 0.0005,
            epochs: 20,
            seed: 42,
            class_weights: None,
            shuffle: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.batch_size == 0 {
            return Err(TrainError::Config("batch_size must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(TrainError::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if let Some(w) = &self.class_weights {
            if w.len() != Label::COUNT || w.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(TrainError::Config(format!(
                    "class weights must be {} positive numbers, got {w:?}",
                    Label::COUNT
                )));
            }
        }
        Ok(())
    }
}

/// Metrics after one epoch. Both train and validation figures come from
/// an inference-mode pass (dropout off) over the whole split, after the
/// epoch's updates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    /// 1-based.
    pub epoch: usize,
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
}

/// Encoded sequences with their labels.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EncodedSet {
    pub seqs: Vec<EncodedSequence>,
    pub labels: Vec<Label>,
}

impl EncodedSet {
    pub fn new(seqs: Vec<EncodedSequence>, labels: Vec<Label>) -> Result<Self, TrainError> {
        if seqs.len() != labels.len() {
            return Err(TrainError::Mismatch(seqs.len(), labels.len()));
        }
        Ok(Self { seqs, labels })
    }

    pub fn encode(docs: &[TokenList], labels: &[Label], vocab: &Vocabulary) -> Result<Self, TrainError> {
        Self::new(docs.iter().map(|d| vocab.encode(d)).collect(), labels.to_vec())
    }

    pub fn len(&self) -> usize {
        self.seqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seqs.is_empty()
    }

    pub fn counts(&self) -> [usize; Label::COUNT] {
        let mut c = [0; Label::COUNT];
        for l in &self.labels {
            c[l.index()] += 1;
        }
        c
    }
}

/// Batches of example indices for one epoch. The permutation depends only
/// on `(seed, epoch)`; the last batch may be short.
pub fn batch_iter(n: usize, batch_size: usize, shuffle: bool, seed: u64, epoch: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    if shuffle {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(epoch as u64);
        order.shuffle(&mut rng);
    }
    order.chunks(batch_size.max(1)).map(<[usize]>::to_vec).collect()
}

/// Inference-mode mean cross-entropy and accuracy.
pub fn evaluate_split(p: &ModelParams, set: &EncodedSet) -> Result<(f64, f64), TrainError> {
    if set.is_empty() {
        return Err(TrainError::EmptySet("evaluation"));
    }
    let per: Vec<(f64, bool)> = set
        .seqs
        .par_iter()
        .zip(set.labels.par_iter())
        .map(|(s, l)| {
            let z = forward_logits(s, p)?;
            let (loss, _) = cross_entropy(&z, l.index())?;
            Ok((loss, argmax(&z) == l.index()))
        })
        .collect::<Result<_, NnError>>()?;
    let n = per.len() as f64;
    let loss = per.iter().map(|x| x.0).sum::<f64>() / n;
    let acc = per.iter().filter(|x| x.1).count() as f64 / n;
    Ok((loss, acc))
}

/// Predicted labels in inference mode.
pub fn predict_set(p: &ModelParams, set: &EncodedSet) -> Result<Vec<Label>, NnError> {
    set.seqs
        .par_iter()
        .map(|s| {
            let z = forward_logits(s, p)?;
            Ok(Label::from_index(argmax(&z)).unwrap_or(Label::Negative))
        })
        .collect()
}

/// Cross-entropy scaled by the weight of the true class.
pub fn weighted_loss(logits: &[f64], label: usize, class_weights: &[f64]) -> Result<f64, NnError> {
    let (ce, _) = cross_entropy(logits, label)?;
    Ok(class_weights.get(label).copied().unwrap_or(1.0) * ce)
}

/// `w_k = N / (C · n_k)`.
pub fn inverse_frequency_weights(counts: &[usize]) -> Result<Vec<f64>, TrainError> {
    let n: usize = counts.iter().sum();
    if counts.contains(&0) {
        return Err(TrainError::Config(format!("class counts {counts:?} contain an empty class")));
    }
    let c = counts.len() as f64;
    Ok(counts.iter().map(|&k| n as f64 / (c * k as f64)).collect())
}

/// Fresh parameters drawn from `seed`.
pub fn init_model(dims: Dims, seed: u64) -> ModelParams {
    ModelParams::init(dims, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub history: Vec<EpochStats>,
    /// Epoch (1-based) and parameters with the highest validation
    /// accuracy; earlier epochs win ties. `None` when no epoch ran.
    pub best: Option<(usize, ModelParams)>,
    pub optimizer: AdamState,
}

/// Trains `params` in place for `cfg.epochs` full epochs; no early
/// stopping. `progress` sees each epoch's stats as soon as they exist.
pub fn train(
    params: &mut ModelParams,
    train_set: &EncodedSet,
    val_set: &EncodedSet,
    cfg: &TrainConfig,
    mut progress: impl FnMut(&EpochStats),
) -> Result<TrainOutcome, TrainError> {
    cfg.validate()?;
    let mut optimizer = AdamState::new(params);
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut best: Option<(usize, f64, ModelParams)> = None;
    if cfg.epochs == 0 {
        return Ok(TrainOutcome {
            history,
            best: None,
            optimizer,
        });
    }
    if train_set.is_empty() {
        return Err(TrainError::EmptySet("training"));
    }
    if val_set.is_empty() {
        return Err(TrainError::EmptySet("validation"));
    }
    // dropout masks come from their own stream so batch order and masks
    // stay independent
    let mut drop_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    drop_rng.set_stream(u64::MAX);
    let weights = cfg.class_weights.as_deref();

    for epoch in 0..cfg.epochs {
        let batches = batch_iter(train_set.len(), cfg.batch_size, cfg.shuffle, cfg.seed, epoch);
        for (bi, idx) in batches.iter().enumerate() {
            let batch: Vec<(&EncodedSequence, usize)> = idx
                .iter()
                .map(|&i| (&train_set.seqs[i], train_set.labels[i].index()))
                .collect();
            let wrap = |source| TrainError::Batch {
                epoch: epoch + 1,
                batch: bi,
                source,
            };
            let (_, grads) = backward(&batch, params, weights, true, &mut drop_rng).map_err(wrap)?;
            adam_step(params, &grads, &mut optimizer, cfg.learning_rate).map_err(wrap)?;
        }
        let (train_loss, train_accuracy) = evaluate_split(params, train_set)?;
        let (val_loss, val_accuracy) = evaluate_split(params, val_set)?;
        let stats = EpochStats {
            epoch: epoch + 1,
            train_loss,
            train_accuracy,
            val_loss,
            val_accuracy,
        };
        if best.as_ref().is_none_or(|b| val_accuracy > b.1) {
            best = Some((epoch + 1, val_accuracy, params.clone()));
        }
        progress(&stats);
        history.push(stats);
    }
    Ok(TrainOutcome {
        history,
        best: best.map(|(e, _, p)| (e, p)),
        optimizer,
    })
}

/// `epoch,train_loss,train_acc,val_loss,val_acc`, one row per epoch.
pub fn write_history<W: Write>(mut w: W, history: &[EpochStats]) -> std::io::Result<()> {
    writeln!(w, "epoch,train_loss,train_acc,val_loss,val_acc")?;
    for s in history {
        writeln!(
            w,
            "{},{},{},{},{}",
            s.epoch, s.train_loss, s.train_accuracy, s.val_loss, s.val_accuracy
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batches() {
        let b = batch_iter(10, 4, false, 0, 0);
        assert_eq!(b.iter().map(Vec::len).collect::<Vec<_>>(), [4, 4, 2]);
        assert_eq!(b.concat(), (0..10).collect::<Vec<_>>());
        let s1 = batch_iter(10, 4, true, 9, 3);
        assert_eq!(s1, batch_iter(10, 4, true, 9, 3));
        assert_ne!(s1, batch_iter(10, 4, true, 9, 4));
        let mut all = s1.concat();
        all.sort();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn weights() {
        let w = inverse_frequency_weights(&[5629, 790]).unwrap();
        assert!((w[0] - 0.570).abs() < 1e-3 && (w[1] - 4.063).abs() < 1e-3);
        assert!(inverse_frequency_weights(&[3, 0]).is_err());
        let l = weighted_loss(&[0.0, 0.0], 1, &[1.0, 2.0]).unwrap();
        assert!((l - 2.0 * 2f64.ln()).abs() < 1e-15);
        let (ce, _) = cross_entropy(&[0.3, -1.2], 0).unwrap();
        assert_eq!(weighted_loss(&[0.3, -1.2], 0, &[1.0, 1.0]).unwrap(), ce);
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = |f: fn(&mut TrainConfig)| {
            let mut c = TrainConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.batch_size = 0));
        assert!(bad(|c| c.learning_rate = 0.0));
        assert!(bad(|c| c.class_weights = Some(vec![1.0, -1.0])));
        assert!(bad(|c| c.class_weights = Some(vec![1.0])));
    }

    #[test]
    fn zero_epochs_leaves_model_alone() {
        let mut p = init_model(Dims { vocab: 5, embed: 2, hidden: 2, classes: 2 }, 1);
        let before = p.clone();
        let out = train(&mut p, &EncodedSet::default(), &EncodedSet::default(), &TrainConfig { epochs: 0, ..Default::default() }, |_| {}).unwrap();
        assert!(out.history.is_empty() && out.best.is_none());
        assert_eq!(p, before);
    }

    #[test]
    fn majority_predictor_accuracy() {
        let mut p = ModelParams::zeros(Dims { vocab: 3, embed: 2, hidden: 2, classes: 2 });
        p.dense.b = vec![1.0, 0.0];
        let mut labels = vec![Label::Negative; 845];
        labels.extend(vec![Label::Positive; 118]);
        let seqs = vec![EncodedSequence { indices: vec![2, 0], true_length: 1 }; 963];
        let set = EncodedSet::new(seqs, labels).unwrap();
        let (_, acc) = evaluate_split(&p, &set).unwrap();
        assert!((acc - 845.0 / 963.0).abs() < 1e-15);
        assert!(evaluate_split(&p, &EncodedSet::default()).is_err());
    }
}
