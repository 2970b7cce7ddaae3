use rand::Rng;
use rayon::prelude::*;

use super::{
    cross_entropy, dense_forward, dropout_mask, embed_forward, gate_activations, next_state, Dims,
    LstmState, ModelParams, NnError, Tensor2, PARAM_NAMES,
};
use crate::vocab::{EncodedSequence, PAD};

/// Gradients congruent to [`ModelParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub embedding: Tensor2,
    pub w_ih: Tensor2,
    pub w_hh: Tensor2,
    pub b_ih: Vec<f64>,
    pub b_hh: Vec<f64>,
    pub dense_w: Tensor2,
    pub dense_b: Vec<f64>,
}

impl Gradients {
    pub fn zeros(d: Dims) -> Self {
        let h4 = 4 * d.hidden;
        Self {
            embedding: Tensor2::zeros(d.vocab, d.embed),
            w_ih: Tensor2::zeros(h4, d.embed),
            w_hh: Tensor2::zeros(h4, d.hidden),
            b_ih: vec![0.0; h4],
            b_hh: vec![0.0; h4],
            dense_w: Tensor2::zeros(d.classes, d.hidden),
            dense_b: vec![0.0; d.classes],
        }
    }

    /// Same order as [`ModelParams::arrays`].
    pub fn arrays(&self) -> [&[f64]; 7] {
        [
            self.embedding.as_slice(),
            self.w_ih.as_slice(),
            self.w_hh.as_slice(),
            &self.b_ih,
            &self.b_hh,
            self.dense_w.as_slice(),
            &self.dense_b,
        ]
    }

    fn check_finite(&self) -> Result<(), NnError> {
        for (name, a) in PARAM_NAMES.iter().zip(self.arrays()) {
            if a.iter().any(|x| !x.is_finite()) {
                return Err(NnError::NonFinite(format!("gradient of {name}")));
            }
        }
        Ok(())
    }
}

/// Keep masks for one example. `None` means that dropout is not applied.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DropoutMasks {
    pub lstm: Option<Vec<f64>>,
    pub fc: Option<Vec<f64>>,
}

impl DropoutMasks {
    pub fn sample<R: Rng + ?Sized>(p: &ModelParams, rng: &mut R) -> Self {
        let h = p.lstm.hidden();
        let lstm = p
            .lstm_dropout_enabled
            .then(|| dropout_mask(h, p.lstm_dropout, rng));
        let fc = Some(dropout_mask(h, p.fc_dropout, rng));
        Self { lstm, fc }
    }

    fn combined(&self, h: usize) -> Option<Vec<f64>> {
        match (&self.lstm, &self.fc) {
            (None, None) => None,
            (a, b) => Some(
                (0..h)
                    .map(|k| a.as_ref().map_or(1.0, |m| m[k]) * b.as_ref().map_or(1.0, |m| m[k]))
                    .collect(),
            ),
        }
    }
}

struct ExampleGrad {
    loss: f64,
    emb_rows: Vec<(u32, Vec<f64>)>,
    w_ih: Tensor2,
    w_hh: Tensor2,
    // b_ih and b_hh receive the same gradient
    b: Vec<f64>,
    dense_w: Tensor2,
    dense_b: Vec<f64>,
}

/// Forward pass with the given masks and unweighted cross-entropy.
pub fn example_loss(
    seq: &EncodedSequence,
    label: usize,
    p: &ModelParams,
    masks: &DropoutMasks,
) -> Result<f64, NnError> {
    example_grad(seq, label, p, masks, 1.0).map(|g| g.loss)
}

fn example_grad(
    seq: &EncodedSequence,
    label: usize,
    p: &ModelParams,
    masks: &DropoutMasks,
    coef: f64,
) -> Result<ExampleGrad, NnError> {
    let d = p.dims();
    let hd = d.hidden;
    let idx = &seq.indices[..seq.true_length.min(seq.indices.len())];
    let xs = embed_forward(idx, &p.embedding)?;

    let mut states = vec![LstmState::zeros(hd)];
    let mut acts = Vec::with_capacity(xs.len());
    for x in &xs {
        let prev = states.last().unwrap();
        let a = gate_activations(x, &prev.h, &p.lstm);
        let next = next_state(&a, &prev.c);
        acts.push(a);
        states.push(next);
    }
    let mask = masks.combined(hd);
    let h_final = &states.last().unwrap().h;
    let feat: Vec<f64> = match &mask {
        Some(m) => h_final.iter().zip(m).map(|(a, b)| a * b).collect(),
        None => h_final.clone(),
    };
    let logits = dense_forward(&feat, &p.dense)?;
    let (ce, mut dlogits) = cross_entropy(&logits, label)?;
    dlogits.iter_mut().for_each(|g| *g *= coef);

    let mut dense_w = Tensor2::zeros(d.classes, hd);
    dense_w.outer_acc(&dlogits, &feat);
    let mut dh = vec![0.0; hd];
    p.dense.w.matvec_t_acc(&dlogits, &mut dh);
    if let Some(m) = &mask {
        dh.iter_mut().zip(m).for_each(|(g, k)| *g *= k);
    }

    let mut w_ih = Tensor2::zeros(4 * hd, d.embed);
    let mut w_hh = Tensor2::zeros(4 * hd, hd);
    let mut b = vec![0.0; 4 * hd];
    let mut emb_rows = Vec::with_capacity(xs.len());
    let mut dc = vec![0.0; hd];
    let mut dz = vec![0.0; 4 * hd];
    for t in (0..xs.len()).rev() {
        let a = &acts[t];
        let (c_prev, c) = (&states[t].c, &states[t + 1].c);
        for k in 0..hd {
            let (i, f, g, o) = (a[k], a[hd + k], a[2 * hd + k], a[3 * hd + k]);
            let tc = c[k].tanh();
            let dc_k = dc[k] + dh[k] * o * (1.0 - tc * tc);
            dz[k] = dc_k * g * i * (1.0 - i);
            dz[hd + k] = dc_k * c_prev[k] * f * (1.0 - f);
            dz[2 * hd + k] = dc_k * i * (1.0 - g * g);
            dz[3 * hd + k] = dh[k] * tc * o * (1.0 - o);
            dc[k] = dc_k * f;
        }
        w_ih.outer_acc(&dz, &xs[t]);
        w_hh.outer_acc(&dz, &states[t].h);
        b.iter_mut().zip(&dz).for_each(|(x, y)| *x += y);
        if idx[t] != PAD {
            let mut dx = vec![0.0; d.embed];
            p.lstm.w_ih.matvec_t_acc(&dz, &mut dx);
            emb_rows.push((idx[t], dx));
        }
        dh.fill(0.0);
        p.lstm.w_hh.matvec_t_acc(&dz, &mut dh);
    }

    Ok(ExampleGrad {
        loss: ce,
        emb_rows,
        w_ih,
        w_hh,
        b,
        dense_w,
        dense_b: dlogits,
    })
}

/// Batch loss and gradients.
///
/// Dropout masks are drawn from `rng` in example order when `training` is
/// set. The loss is the mean cross-entropy, or the weight-normalized mean
/// `Σ w_y·CE / Σ w_y` when class weights are given. Examples are
/// differentiated in parallel and summed in index order, so results do not
/// depend on the thread count.
pub fn backward<R: Rng + ?Sized>(
    batch: &[(&EncodedSequence, usize)],
    p: &ModelParams,
    class_weights: Option<&[f64]>,
    training: bool,
    rng: &mut R,
) -> Result<(f64, Gradients), NnError> {
    let masks: Vec<DropoutMasks> = batch
        .iter()
        .map(|_| {
            if training {
                DropoutMasks::sample(p, rng)
            } else {
                DropoutMasks::default()
            }
        })
        .collect();
    backward_with_masks(batch, p, class_weights, &masks)
}

/// [`backward`] with caller-supplied masks, one per example.
pub fn backward_with_masks(
    batch: &[(&EncodedSequence, usize)],
    p: &ModelParams,
    class_weights: Option<&[f64]>,
    masks: &[DropoutMasks],
) -> Result<(f64, Gradients), NnError> {
    if batch.is_empty() {
        return Err(NnError::EmptyBatch);
    }
    if masks.len() != batch.len() {
        return Err(NnError::Shape(format!("{} masks for {} examples", masks.len(), batch.len())));
    }
    let d = p.dims();
    let weight = |y: usize| class_weights.map_or(1.0, |w| w.get(y).copied().unwrap_or(1.0));
    for &(_, y) in batch {
        if y >= d.classes {
            return Err(NnError::BadLabel {
                label: y,
                classes: d.classes,
            });
        }
    }
    let norm: f64 = batch.iter().map(|&(_, y)| weight(y)).sum();

    let parts: Vec<ExampleGrad> = batch
        .par_iter()
        .zip(masks.par_iter())
        .map(|(&(seq, y), m)| {
            let w = weight(y);
            example_grad(seq, y, p, m, w / norm).map(|mut g| {
                g.loss *= w / norm;
                g
            })
        })
        .collect::<Result<_, _>>()?;

    let mut grads = Gradients::zeros(d);
    let mut loss = 0.0;
    for g in parts {
        loss += g.loss;
        for (row, dx) in g.emb_rows {
            let r = grads.embedding.row_mut(row as usize);
            r.iter_mut().zip(&dx).for_each(|(a, b)| *a += b);
        }
        add(grads.w_ih.as_mut_slice(), g.w_ih.as_slice());
        add(grads.w_hh.as_mut_slice(), g.w_hh.as_slice());
        add(&mut grads.b_ih, &g.b);
        add(&mut grads.b_hh, &g.b);
        add(grads.dense_w.as_mut_slice(), g.dense_w.as_slice());
        add(&mut grads.dense_b, &g.dense_b);
    }
    if !loss.is_finite() {
        return Err(NnError::NonFinite("loss".into()));
    }
    grads.check_finite()?;
    Ok((loss, grads))
}

fn add(dst: &mut [f64], src: &[f64]) {
    dst.iter_mut().zip(src).for_each(|(a, b)| *a += b);
}
