use super::SparseVec;
use crate::ingest::Label;
use crate::nn::{argmax, softmax};

/// Multinomial Naive Bayes with Laplace smoothing α = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    /// `-inf` for a class absent from training.
    pub log_prior: [f64; 2],
    /// Per class, one log likelihood per feature.
    pub log_likelihood: [Vec<f64>; 2],
}

pub const ALPHA: f64 = 1.0;

impl NaiveBayesModel {
    /// `counts[i]` are raw term counts of document `i`. A class with no
    /// training documents gets prior 0 and is never predicted.
    pub fn fit(counts: &[SparseVec], labels: &[Label], n_features: usize) -> Self {
        assert_eq!(counts.len(), labels.len(), "documents and labels differ in length");
        let mut docs = [0usize; 2];
        let mut term = [vec![0.0; n_features], vec![0.0; n_features]];
        for (x, l) in counts.iter().zip(labels) {
            let k = l.index();
            docs[k] += 1;
            for &(i, c) in x {
                term[k][i] += c;
            }
        }
        let n = counts.len().max(1) as f64;
        let log_prior = docs.map(|d| (d as f64 / n).ln());
        let log_likelihood = term.map(|t| {
            let total: f64 = t.iter().sum::<f64>() + ALPHA * n_features as f64;
            t.iter().map(|c| ((c + ALPHA) / total).ln()).collect()
        });
        Self {
            log_prior,
            log_likelihood,
        }
    }

    /// Unnormalized log posterior per class.
    pub fn joint_log_likelihood(&self, x: &SparseVec) -> [f64; 2] {
        std::array::from_fn(|k| {
            self.log_prior[k]
                + x.iter()
                    .map(|&(i, c)| c * self.log_likelihood[k][i])
                    .sum::<f64>()
        })
    }

    pub fn predict_proba(&self, x: &SparseVec) -> [f64; 2] {
        let p = softmax(&self.joint_log_likelihood(x));
        [p[0], p[1]]
    }

    /// Ties go to Negative.
    pub fn predict(&self, x: &SparseVec) -> Label {
        Label::from_index(argmax(&self.joint_log_likelihood(x))).unwrap_or(Label::Negative)
    }
}
