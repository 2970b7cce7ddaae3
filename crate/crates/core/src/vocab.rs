//! Token ↔ index mapping with reserved PAD (0) and OOV (1) slots, and
//! fixed-length encoding.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::preprocess::TokenList;

pub const PAD: u32 = 0;
pub const OOV: u32 = 1;
/// Number of reserved indices before the first real token.
pub const RESERVED: usize = 2;
/// What [`decode`] emits for the OOV index.
pub const UNK_TOKEN: &str = "⟨unk⟩";
pub const MAX_LEN_CAP: usize = 100;

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("cannot build a vocabulary from an empty corpus")]
    EmptyCorpus,
    #[error("min_freq must be at least 1")]
    BadMinFreq,
    #[error("index {index} out of range for vocabulary of size {size}")]
    IndexOutOfRange { index: u32, size: usize },
    #[error("{path}: {reason}")]
    Format { path: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
    /// Sequence length used by [`Vocabulary::encode`].
    pub max_len: usize,
    pub min_freq: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedSequence {
    pub indices: Vec<u32>,
    pub true_length: usize,
}

/// Builds a vocabulary from training-split documents. Tokens are ordered by
/// descending frequency, ties broken lexicographically.
pub fn build_vocab(corpus: &[TokenList], min_freq: usize) -> Result<Vocabulary, VocabError> {
    if min_freq == 0 {
        return Err(VocabError::BadMinFreq);
    }
    let mut freq: HashMap<&str, usize> = HashMap::new();
    for doc in corpus {
        for t in doc {
            *freq.entry(t.as_str()).or_default() += 1;
        }
    }
    if freq.is_empty() {
        return Err(VocabError::EmptyCorpus);
    }
    let mut entries: Vec<(&str, usize)> = freq.into_iter().filter(|&(_, n)| n >= min_freq).collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let lengths: Vec<usize> = corpus.iter().map(Vec::len).collect();
    Ok(Vocabulary::from_tokens(
        entries.into_iter().map(|(t, _)| t.to_string()).collect(),
        default_max_len(&lengths),
        min_freq,
    ))
}

/// Nearest-rank 95th percentile of `lengths`, clamped to `1..=100`.
pub fn default_max_len(lengths: &[usize]) -> usize {
    if lengths.is_empty() {
        return 1;
    }
    let mut sorted = lengths.to_vec();
    sorted.sort_unstable();
    let rank = (0.95 * sorted.len() as f64).ceil() as usize;
    sorted[rank.max(1) - 1].clamp(1, MAX_LEN_CAP)
}

impl Vocabulary {
    /// `tokens[k]` receives index `k + 2`.
    pub fn from_tokens(tokens: Vec<String>, max_len: usize, min_freq: usize) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), (i + RESERVED) as u32))
            .collect();
        Self {
            tokens,
            index,
            max_len: max_len.max(1),
            min_freq,
        }
    }

    /// Total size including the reserved indices.
    pub fn size(&self) -> usize {
        self.tokens.len() + RESERVED
    }

    pub fn index_of(&self, token: &str) -> u32 {
        self.index.get(token).copied().unwrap_or(OOV)
    }

    /// The real token at `index`, or `None` for reserved or out-of-range
    /// indices.
    pub fn token(&self, index: u32) -> Option<&str> {
        (index as usize)
            .checked_sub(RESERVED)
            .and_then(|i| self.tokens.get(i))
            .map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn encode(&self, tokens: &[String]) -> EncodedSequence {
        encode(tokens, self, self.max_len)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), VocabError> {
        let path = path.as_ref();
        let mut body = String::new();
        for t in &self.tokens {
            body.push_str(t);
            body.push('\n');
        }
        write(path, &body)?;
        let meta = format!(
            "max_len={} min_freq={} size={}\n",
            self.max_len,
            self.min_freq,
            self.size()
        );
        write(&meta_path(path), &meta)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, VocabError> {
        let path = path.as_ref();
        let body = read(path)?;
        let tokens: Vec<String> = body.lines().map(str::to_string).collect();
        let mp = meta_path(path);
        let meta = read(&mp)?;
        let bad = |reason: String| VocabError::Format {
            path: mp.display().to_string(),
            reason,
        };
        let mut fields: HashMap<&str, usize> = HashMap::new();
        for kv in meta.split_whitespace() {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, found `{kv}`")))?;
            let v = v.parse().map_err(|_| bad(format!("`{k}` is not an integer")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| bad(format!("missing `{k}`")));
        let (max_len, min_freq) = (get("max_len")?, get("min_freq")?);
        if let Some(&size) = fields.get("size") {
            if size != tokens.len() + RESERVED {
                return Err(bad(format!(
                    "size {size} does not match {} tokens",
                    tokens.len()
                )));
            }
        }
        if tokens.iter().any(String::is_empty) {
            return Err(VocabError::Format {
                path: path.display().to_string(),
                reason: "empty token line".into(),
            });
        }
        Ok(Self::from_tokens(tokens, max_len, min_freq))
    }
}

/// Sidecar path holding `max_len` and `min_freq`.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn write(path: &Path, body: &str) -> Result<(), VocabError> {
    fs::write(path, body).map_err(|source| VocabError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read(path: &Path) -> Result<String, VocabError> {
    fs::read_to_string(path).map_err(|source| VocabError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Keeps the first `max_len` tokens and post-pads with [`PAD`].
pub fn encode(tokens: &[String], v: &Vocabulary, max_len: usize) -> EncodedSequence {
    let max_len = max_len.max(1);
    let mut indices: Vec<u32> = tokens.iter().take(max_len).map(|t| v.index_of(t)).collect();
    let true_length = indices.len();
    indices.resize(max_len, PAD);
    EncodedSequence {
        indices,
        true_length,
    }
}

pub fn decode(seq: &EncodedSequence, v: &Vocabulary) -> Result<TokenList, VocabError> {
    let mut out = Vec::new();
    for &i in &seq.indices {
        match i {
            PAD => {}
            OOV => out.push(UNK_TOKEN.to_string()),
            _ => out.push(
                v.token(i)
                    .ok_or(VocabError::IndexOutOfRange {
                        index: i,
                        size: v.size(),
                    })?
                    .to_string(),
            ),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &[&str]) -> TokenList {
        s.iter().map(|t| t.to_string()).collect()
    }

    fn ab() -> Vocabulary {
        build_vocab(&[toks(&["a", "b", "a"])], 1).unwrap()
    }

    #[test]
    fn build_small() {
        let v = ab();
        assert_eq!(v.size(), 4);
        assert_eq!((v.index_of("a"), v.index_of("b")), (2, 3));
        let v2 = build_vocab(&[toks(&["a", "b", "a"])], 2).unwrap();
        assert_eq!(v2.size(), 3);
        assert_eq!(v2.index_of("b"), OOV);
    }

    #[test]
    fn ties_are_lexicographic() {
        let v = build_vocab(&[toks(&["z", "y", "x", "y"])], 1).unwrap();
        assert_eq!(v.tokens(), toks(&["y", "x", "z"]).as_slice());
    }

    #[test]
    fn build_rejects_empty() {
        assert!(matches!(build_vocab(&[], 1), Err(VocabError::EmptyCorpus)));
        assert!(matches!(build_vocab(&[vec![]], 1), Err(VocabError::EmptyCorpus)));
        assert!(matches!(build_vocab(&[toks(&["a"])], 0), Err(VocabError::BadMinFreq)));
    }

    #[test]
    fn encoding() {
        let v = ab();
        let e = encode(&toks(&["a", "b"]), &v, 4);
        assert_eq!((e.indices, e.true_length), (vec![2, 3, 0, 0], 2));
        let e = encode(&toks(&["z"]), &v, 2);
        assert_eq!((e.indices, e.true_length), (vec![1, 0], 1));
        let e = encode(&[], &v, 3);
        assert_eq!((e.indices, e.true_length), (vec![0, 0, 0], 0));
        let e = encode(&toks(&["b", "a", "a"]), &v, 2);
        assert_eq!((e.indices, e.true_length), (vec![3, 2], 2));
    }

    #[test]
    fn decoding() {
        let v = ab();
        let seq = |i: Vec<u32>| EncodedSequence {
            true_length: i.iter().filter(|&&x| x != 0).count(),
            indices: i,
        };
        assert_eq!(decode(&seq(vec![2, 3, 0, 0]), &v).unwrap(), toks(&["a", "b"]));
        assert_eq!(decode(&seq(vec![1, 0]), &v).unwrap(), toks(&[UNK_TOKEN]));
        assert!(decode(&seq(vec![0, 0, 0]), &v).unwrap().is_empty());
        assert!(matches!(
            decode(&seq(vec![4]), &v),
            Err(VocabError::IndexOutOfRange { index: 4, size: 4 })
        ));
    }

    #[test]
    fn max_len_percentile() {
        assert_eq!(default_max_len(&[]), 1);
        assert_eq!(default_max_len(&[0, 0]), 1);
        let lens: Vec<usize> = (1..=100).collect();
        assert_eq!(default_max_len(&lens), 95);
        assert_eq!(default_max_len(&[500; 10]), 100);
        assert_eq!(default_max_len(&[3, 1, 2]), 3);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("vocab.txt");
        let v = build_vocab(&[toks(&["makan", "enak", "makan"])], 1).unwrap();
        v.save(&p).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "makan\nenak\n");
        assert_eq!(Vocabulary::load(&p).unwrap(), v);
        fs::remove_file(meta_path(&p)).unwrap();
        assert!(Vocabulary::load(&p).is_err());
    }
}
