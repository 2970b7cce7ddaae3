use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::SparseVec;
use crate::ingest::Label;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("no training documents")]
    Empty,
    #[error("{0} documents but {1} labels")]
    Mismatch(usize, usize),
    #[error("training diverged (non-finite weights)")]
    Diverged,
    #[error("invalid setting: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Logistic,
    Hinge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConfig {
    pub objective: Objective,
    /// L2 strength λ.
    pub lambda: f64,
    /// Step size for logistic regression, and for the hinge solver when
    /// λ = 0.
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl LinearConfig {
    pub fn logistic() -> Self {
        Self {
            objective: Objective::Logistic,
            lambda: 1e-4,
            lr: 1.0,
            epochs: 300,
            seed: 42,
        }
    }

    pub fn svm() -> Self {
        Self {
            objective: Objective::Hinge,
            lambda: 1e-4,
            lr: 0.1,
            epochs: 30,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub w: Vec<f64>,
    pub b: f64,
    pub objective: Objective,
    pub lambda: f64,
}

impl LinearModel {
    pub fn score(&self, x: &SparseVec) -> f64 {
        self.b + x.iter().map(|&(i, v)| self.w[i] * v).sum::<f64>()
    }

    /// Positive only for a strictly positive score.
    pub fn predict(&self, x: &SparseVec) -> Label {
        if self.score(x) > 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

fn sign(l: Label) -> f64 {
    match l {
        Label::Positive => 1.0,
        Label::Negative => -1.0,
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean log loss plus `λ/2·‖w‖²` (bias unregularized).
pub fn logistic_objective(m: &LinearModel, x: &[SparseVec], y: &[Label], lambda: f64) -> f64 {
    let data: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, &yi)| softplus(-sign(yi) * m.score(xi)))
        .sum::<f64>()
        / x.len() as f64;
    data + 0.5 * lambda * m.w.iter().map(|w| w * w).sum::<f64>()
}

/// Gradient of the data term of [`logistic_objective`] (without the L2
/// part) as `(dw, db)`.
pub fn logistic_gradient(m: &LinearModel, x: &[SparseVec], y: &[Label]) -> (Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut dw = vec![0.0; m.w.len()];
    let mut db = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let s = sign(yi);
        let g = -s * sigmoid(-s * m.score(xi)) / n;
        for &(i, v) in xi {
            dw[i] += g * v;
        }
        db += g;
    }
    (dw, db)
}

/// Full-batch proximal gradient descent for the logistic objective;
/// Pegasos-style stochastic subgradient descent for the hinge objective.
pub fn linear_fit(
    x: &[SparseVec],
    y: &[Label],
    n_features: usize,
    cfg: &LinearConfig,
) -> Result<LinearModel, FitError> {
    if x.len() != y.len() {
        return Err(FitError::Mismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(FitError::Empty);
    }
    if !(cfg.lambda >= 0.0 && cfg.lambda.is_finite()) {
        return Err(FitError::Config(format!("lambda {} must be >= 0", cfg.lambda)));
    }
    let mut m = LinearModel {
        w: vec![0.0; n_features],
        b: 0.0,
        objective: cfg.objective,
        lambda: cfg.lambda,
    };
    match cfg.objective {
        Objective::Logistic => {
            if !(cfg.lr > 0.0) {
                return Err(FitError::Config("lr must be positive".into()));
            }
            // the L2 term is applied as a proximal step, which stays stable
            // for any λ
            let shrink = 1.0 / (1.0 + cfg.lr * cfg.lambda);
            for _ in 0..cfg.epochs {
                let (dw, db) = logistic_gradient(&m, x, y);
                for (w, g) in m.w.iter_mut().zip(&dw) {
                    *w = (*w - cfg.lr * g) * shrink;
                }
                m.b -= cfg.lr * db;
            }
        }
        Objective::Hinge => pegasos(&mut m, x, y, cfg)?,
    }
    if !m.b.is_finite() || m.w.iter().any(|w| !w.is_finite()) {
        return Err(FitError::Diverged);
    }
    Ok(m)
}

// The bias is treated as a weight on a constant feature and regularized
// with the rest. Weights are stored as `scale · v` so that shrinking is
// O(1) per step.
fn pegasos(m: &mut LinearModel, x: &[SparseVec], y: &[Label], cfg: &LinearConfig) -> Result<(), FitError> {
    let lambda = cfg.lambda;
    if lambda == 0.0 && !(cfg.lr > 0.0) {
        return Err(FitError::Config("lr must be positive when lambda is 0".into()));
    }
    let d = m.w.len();
    let mut v = vec![0.0; d + 1];
    let mut scale = 1.0;
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut t = 0u64;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = if lambda > 0.0 { 1.0 / (lambda * t as f64) } else { cfg.lr };
            let s = sign(y[i]);
            let margin = s * scale * (v[d] + x[i].iter().map(|&(j, xv)| v[j] * xv).sum::<f64>());
            let decay = 1.0 - eta * lambda;
            if decay <= 0.0 {
                v.fill(0.0);
                scale = 1.0;
            } else {
                scale *= decay;
            }
            if margin < 1.0 {
                let step = eta * s / scale;
                for &(j, xv) in &x[i] {
                    v[j] += step * xv;
                }
                v[d] += step;
            }
            if scale < 1e-9 {
                v.iter_mut().for_each(|a| *a *= scale);
                scale = 1.0;
            }
        }
    }
    for (w, a) in m.w.iter_mut().zip(&v) {
        *w = scale * a;
    }
    m.b = scale * v[d];
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Negative as N, Positive as P};

    fn toy() -> (Vec<SparseVec>, Vec<Label>) {
        (
            vec![vec![(0, 1.0)], vec![(0, 1.0)], vec![(1, 1.0)], vec![(1, 1.0)]],
            vec![P, P, N, N],
        )
    }

    fn accuracy(m: &LinearModel, x: &[SparseVec], y: &[Label]) -> f64 {
        x.iter().zip(y).filter(|(a, b)| m.predict(a) == **b).count() as f64 / y.len() as f64
    }

    #[test]
    fn separable_toy_is_fitted_by_both() {
        let (x, y) = toy();
        for cfg in [LinearConfig::logistic(), LinearConfig::svm()] {
            let m = linear_fit(&x, &y, 2, &cfg).unwrap();
            assert_eq!(accuracy(&m, &x, &y), 1.0, "{:?}", cfg.objective);
        }
    }

    #[test]
    fn heavy_regularization_shrinks_weights() {
        let (x, y) = toy();
        for base in [LinearConfig::logistic(), LinearConfig::svm()] {
            let cfg = LinearConfig { lambda: 1e6, ..base };
            let m = linear_fit(&x, &y, 2, &cfg).unwrap();
            assert!(m.w.iter().all(|w| w.abs() < 1e-5), "{:?}: {:?}", cfg.objective, m.w);
        }
    }

    #[test]
    fn logistic_gradient_matches_finite_differences() {
        let x = vec![
            vec![(0, 0.5), (1, -1.0), (2, 2.0)],
            vec![(1, 0.3)],
            vec![(0, -0.7), (2, 0.1)],
        ];
        let y = vec![P, N, P];
        let m = LinearModel {
            w: vec![0.2, -0.4, 0.1],
            b: 0.05,
            objective: Objective::Logistic,
            lambda: 0.0,
        };
        let (dw, db) = logistic_gradient(&m, &x, &y);
        let h = 1e-6;
        for k in 0..4 {
            let mut plus = m.clone();
            let mut minus = m.clone();
            if k < 3 {
                plus.w[k] += h;
                minus.w[k] -= h;
            } else {
                plus.b += h;
                minus.b -= h;
            }
            let num = (logistic_objective(&plus, &x, &y, 0.0) - logistic_objective(&minus, &x, &y, 0.0)) / (2.0 * h);
            let ana = if k < 3 { dw[k] } else { db };
            let rel = (num - ana).abs() / num.abs().max(ana.abs()).max(1e-12);
            assert!(rel < 1e-6, "param {k}: {ana} vs {num}");
        }
    }

    #[test]
    fn logistic_loss_decreases_monotonically() {
        let (x, y) = toy();
        let mut prev = f64::INFINITY;
        for epochs in 0..40 {
            let cfg = LinearConfig { epochs, lr: 0.5, ..LinearConfig::logistic() };
            let m = linear_fit(&x, &y, 2, &cfg).unwrap();
            let l = logistic_objective(&m, &x, &y, cfg.lambda);
            assert!(l <= prev + 1e-15, "epoch {epochs}: {l} > {prev}");
            prev = l;
        }
    }

    #[test]
    fn deterministic_svm() {
        let (x, y) = toy();
        let a = linear_fit(&x, &y, 2, &LinearConfig::svm()).unwrap();
        let b = linear_fit(&x, &y, 2, &LinearConfig::svm()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        assert_eq!(linear_fit(&[], &[], 2, &LinearConfig::svm()), Err(FitError::Empty));
        assert!(matches!(linear_fit(&[vec![]], &[], 2, &LinearConfig::svm()), Err(FitError::Mismatch(1, 0))));
    }
}
