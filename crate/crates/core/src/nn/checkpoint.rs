//! Binary checkpoint format, all integers and floats little-endian:
//!
//! ```text
//! magic "LSTMSENT" | version u32
//! V u64 | E u64 | H u64 | C u64 | max_len u64
//! lstm_dropout f64 | lstm_dropout_enabled u8 | fc_dropout f64
//! vocab reference (u64 length + UTF-8) | config text (u64 length + UTF-8)
//! 7 arrays, each u64 length + f64 values:
//!     embedding, lstm.w_ih, lstm.w_hh, lstm.b_ih, lstm.b_hh, dense.w, dense.b
//! adam flag u8; when 1: t u64, then 7 first-moment and 7 second-moment arrays
//! ```

use std::fs;
use std::path::Path;

use super::{expected_lengths, AdamState, Dims, ModelParams, NnError, Tensor2, PARAM_NAMES};

pub const MAGIC: &[u8; 8] = b"LSTMSENT";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub adam: Option<AdamState>,
    pub max_len: usize,
    /// Path of the vocabulary file the model was trained with.
    pub vocab_ref: String,
    /// Resolved configuration, free text.
    pub config: String,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let d = self.params.dims();
        let mut b = Vec::new();
        b.extend_from_slice(MAGIC);
        b.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        for n in [d.vocab, d.embed, d.hidden, d.classes, self.max_len] {
            b.extend_from_slice(&(n as u64).to_le_bytes());
        }
        b.extend_from_slice(&self.params.lstm_dropout.to_le_bytes());
        b.push(self.params.lstm_dropout_enabled as u8);
        b.extend_from_slice(&self.params.fc_dropout.to_le_bytes());
        put_str(&mut b, &self.vocab_ref);
        put_str(&mut b, &self.config);
        for a in self.params.arrays() {
            put_array(&mut b, a);
        }
        match &self.adam {
            None => b.push(0),
            Some(st) => {
                b.push(1);
                b.extend_from_slice(&st.t.to_le_bytes());
                for a in st.m.iter().chain(&st.v) {
                    put_array(&mut b, a);
                }
            }
        }
        b
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NnError> {
        let mut r = Reader { buf: bytes };
        if r.take(MAGIC.len())? != MAGIC {
            return Err(NnError::BadMagic);
        }
        let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(NnError::Version {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let mut dims = [0usize; 5];
        for d in &mut dims {
            *d = r.usize()?;
        }
        let [vocab, embed, hidden, classes, max_len] = dims;
        let d = Dims {
            vocab,
            embed,
            hidden,
            classes,
        };
        let lstm_dropout = r.f64()?;
        let lstm_dropout_enabled = r.take(1)?[0] != 0;
        let fc_dropout = r.f64()?;
        let vocab_ref = r.string()?;
        let config = r.string()?;

        let expect = expected_lengths(d);
        let mut arrays = Vec::with_capacity(7);
        for (name, n) in PARAM_NAMES.iter().zip(expect) {
            arrays.push(r.array(name, n)?);
        }
        let adam = match r.take(1)?[0] {
            0 => None,
            1 => {
                let t = r.u64()?;
                let mut m = Vec::with_capacity(7);
                let mut v = Vec::with_capacity(7);
                for (name, n) in PARAM_NAMES.iter().zip(expect) {
                    m.push(r.array(name, n)?);
                }
                for (name, n) in PARAM_NAMES.iter().zip(expect) {
                    v.push(r.array(name, n)?);
                }
                Some(AdamState { m, v, t })
            }
            f => return Err(NnError::Corrupt(format!("optimizer flag {f}"))),
        };
        if !r.buf.is_empty() {
            return Err(NnError::Corrupt(format!("{} trailing bytes", r.buf.len())));
        }

        let mut it = arrays.into_iter();
        let mut next = || it.next().unwrap();
        let mut params = ModelParams::zeros(d);
        params.embedding.weights = Tensor2::from_vec(vocab, embed, next())?;
        params.lstm.w_ih = Tensor2::from_vec(4 * hidden, embed, next())?;
        params.lstm.w_hh = Tensor2::from_vec(4 * hidden, hidden, next())?;
        params.lstm.b_ih = next();
        params.lstm.b_hh = next();
        params.dense.w = Tensor2::from_vec(classes, hidden, next())?;
        params.dense.b = next();
        params.lstm_dropout = lstm_dropout;
        params.lstm_dropout_enabled = lstm_dropout_enabled;
        params.fc_dropout = fc_dropout;
        Ok(Self {
            params,
            adam,
            max_len,
            vocab_ref,
            config,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), NnError> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|source| NnError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NnError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| NnError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_bytes(&bytes)
    }

    /// Loads and additionally requires the stored dimensions to equal
    /// `expected`.
    pub fn load_expecting(path: impl AsRef<Path>, expected: Dims) -> Result<Self, NnError> {
        let c = Self::load(path)?;
        let found = c.params.dims();
        if found != expected {
            return Err(NnError::Dimension(format!("file has {found:?}, expected {expected:?}")));
        }
        Ok(c)
    }
}

fn put_str(b: &mut Vec<u8>, s: &str) {
    b.extend_from_slice(&(s.len() as u64).to_le_bytes());
    b.extend_from_slice(s.as_bytes());
}

fn put_array(b: &mut Vec<u8>, a: &[f64]) {
    b.extend_from_slice(&(a.len() as u64).to_le_bytes());
    for x in a {
        b.extend_from_slice(&x.to_le_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], NnError> {
        if self.buf.len() < n {
            return Err(NnError::Truncated);
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    fn u64(&mut self) -> Result<u64, NnError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize, NnError> {
        usize::try_from(self.u64()?).map_err(|_| NnError::Corrupt("size overflows usize".into()))
    }

    fn f64(&mut self) -> Result<f64, NnError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, NnError> {
        let n = self.usize()?;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| NnError::Corrupt("invalid UTF-8 string".into()))
    }

    fn array(&mut self, name: &str, expected: usize) -> Result<Vec<f64>, NnError> {
        let n = self.usize()?;
        if n != expected {
            return Err(NnError::Dimension(format!(
                "{name} stores {n} values but the header implies {expected}"
            )));
        }
        let bytes = self.take(n.checked_mul(8).ok_or(NnError::Truncated)?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}
