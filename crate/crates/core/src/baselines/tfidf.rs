use std::collections::{BTreeMap, HashMap};

use crate::preprocess::TokenList;

/// Sparse vector as `(feature index, value)` pairs sorted by index.
pub type SparseVec = Vec<(usize, f64)>;

/// Smoothed TF-IDF: raw term counts times `ln((1+N)/(1+df)) + 1`,
/// L2-normalized when nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfVectorizer {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    df: Vec<usize>,
    idf: Vec<f64>,
    n_docs: usize,
}

impl TfidfVectorizer {
    /// Vocabulary is every training term, indexed in lexicographic order.
    pub fn fit(corpus: &[TokenList]) -> Self {
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in corpus {
            let mut seen: Vec<&str> = doc.iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for t in seen {
                *df.entry(t).or_default() += 1;
            }
        }
        let n = corpus.len();
        let terms: Vec<String> = df.keys().map(|t| t.to_string()).collect();
        let df: Vec<usize> = df.into_values().collect();
        let idf = df
            .iter()
            .map(|&d| ((1.0 + n as f64) / (1.0 + d as f64)).ln() + 1.0)
            .collect();
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Self {
            terms,
            index,
            df,
            idf,
            n_docs: n,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn document_frequency(&self, term: &str) -> Option<usize> {
        self.index.get(term).map(|&i| self.df[i])
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    /// Raw in-vocabulary term counts; unknown terms are ignored.
    pub fn counts(&self, doc: &[String]) -> SparseVec {
        let mut c: BTreeMap<usize, f64> = BTreeMap::new();
        for t in doc {
            if let Some(&i) = self.index.get(t) {
                *c.entry(i).or_default() += 1.0;
            }
        }
        c.into_iter().collect()
    }

    pub fn transform(&self, doc: &[String]) -> SparseVec {
        let mut v: SparseVec = self
            .counts(doc)
            .into_iter()
            .map(|(i, tf)| (i, tf * self.idf[i]))
            .collect();
        let norm = v.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|(_, x)| *x /= norm);
        }
        v
    }
}
