//! The six-step cleaning chain: case folding, cleaning, slang
//! normalization, tokenization, stopword removal and stemming.

mod stemmer;

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use regex::Regex;
use thiserror::Error;

pub use stemmer::Stemmer;

/// Ordered lowercase tokens.
pub type TokenList = Vec<String>;

const ROOT_WORDS: &str = include_str!("../../data/root_words.txt");
const STOPWORDS: &str = include_str!("../../data/stopwords_id.txt");
const SLANG: &str = include_str!("../../data/slang_id.tsv");

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Format {
        path: String,
        line: usize,
        reason: String,
    },
}

/// Per-step switches. Tokenization runs regardless of its flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Steps {
    pub case_fold: bool,
    pub clean: bool,
    pub normalize: bool,
    pub tokenize: bool,
    pub stopwords: bool,
    pub stem: bool,
}

impl Steps {
    pub const ALL: Steps = Steps {
        case_fold: true,
        clean: true,
        normalize: true,
        tokenize: true,
        stopwords: true,
        stem: true,
    };
    pub const NONE: Steps = Steps {
        case_fold: false,
        clean: false,
        normalize: false,
        tokenize: false,
        stopwords: false,
        stem: false,
    };
}

impl Default for Steps {
    fn default() -> Self {
        Steps::ALL
    }
}

#[derive(Debug, Clone)]
pub struct PreprocessConfig {
    pub steps: Steps,
    /// Drop stems that are themselves stopwords (`dijadikan` → `jadi`).
    /// Without it a second pass over the output would remove them.
    pub stopwords_after_stem: bool,
    pub slang: Arc<HashMap<String, String>>,
    pub stopwords: Arc<HashSet<String>>,
    pub stemmer: Arc<Stemmer>,
}

impl PreprocessConfig {
    /// All steps enabled with the dictionaries shipped in `data/`.
    pub fn bundled() -> Self {
        static BUNDLED: OnceLock<PreprocessConfig> = OnceLock::new();
        BUNDLED
            .get_or_init(|| PreprocessConfig {
                steps: Steps::ALL,
                stopwords_after_stem: true,
                slang: Arc::new(parse_slang(SLANG, "slang_id.tsv").expect("bundled slang map")),
                stopwords: Arc::new(parse_word_list(STOPWORDS)),
                stemmer: Arc::new(Stemmer::new(parse_word_list(ROOT_WORDS))),
            })
            .clone()
    }

    /// All steps enabled, every dictionary empty.
    pub fn empty() -> Self {
        Self {
            steps: Steps::ALL,
            stopwords_after_stem: true,
            slang: Arc::default(),
            stopwords: Arc::default(),
            stemmer: Arc::new(Stemmer::new(Vec::<String>::new())),
        }
    }

    pub fn with_steps(mut self, steps: Steps) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_slang(mut self, slang: HashMap<String, String>) -> Self {
        self.slang = Arc::new(slang);
        self
    }

    pub fn with_stopwords(mut self, stopwords: HashSet<String>) -> Self {
        self.stopwords = Arc::new(stopwords);
        self
    }

    pub fn with_roots<I, S>(mut self, roots: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.stemmer = Arc::new(Stemmer::new(roots));
        self
    }

    /// Replaces whichever dictionaries are given with files from disk.
    pub fn load_overrides(
        mut self,
        roots: Option<&Path>,
        stopwords: Option<&Path>,
        slang: Option<&Path>,
    ) -> Result<Self, PreprocessError> {
        if let Some(p) = roots {
            self.stemmer = Arc::new(Stemmer::new(parse_word_list(&read(p)?)));
        }
        if let Some(p) = stopwords {
            self.stopwords = Arc::new(parse_word_list(&read(p)?));
        }
        if let Some(p) = slang {
            self.slang = Arc::new(parse_slang(&read(p)?, &p.display().to_string())?);
        }
        Ok(self)
    }
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self::bundled()
    }
}

fn read(path: &Path) -> Result<String, PreprocessError> {
    fs::read_to_string(path).map_err(|source| PreprocessError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// One lowercase entry per line; blank lines ignored.
pub fn parse_word_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .collect()
}

/// `slang<TAB>standard` per line; blank lines ignored.
pub fn parse_slang(text: &str, origin: &str) -> Result<HashMap<String, String>, PreprocessError> {
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('\t') else {
            return Err(PreprocessError::Format {
                path: origin.to_string(),
                line: i + 1,
                reason: "expected `slang<TAB>standard`".into(),
            });
        };
        let (k, v) = (k.trim().to_lowercase(), v.trim().to_lowercase());
        if k.is_empty() || v.is_empty() {
            return Err(PreprocessError::Format {
                path: origin.to_string(),
                line: i + 1,
                reason: "empty slang or standard form".into(),
            });
        }
        map.insert(k, v);
    }
    Ok(map)
}

pub fn case_fold(text: &str) -> String {
    text.to_lowercase()
}

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)(?:[a-z][a-z0-9+.\-]*://|\bwww\.)\S*").unwrap())
}

fn tag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[@#]\w+").unwrap())
}

/// Strips URLs, mentions, hashtags, digits and everything outside
/// `[a-z ]`, then collapses whitespace. Expects case-folded input;
/// uppercase letters are removed like any other symbol.
pub fn clean(text: &str) -> String {
    let text = url_re().replace_all(text, " ");
    let text = tag_re().replace_all(&text, " ");
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for ch in text.chars() {
        if ch.is_whitespace() {
            pending_space = !out.is_empty();
        } else if ch.is_ascii_lowercase() {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(ch);
        }
        // digits, punctuation and any other symbol vanish in place
    }
    out
}

/// Whole-word, single-pass dictionary substitution.
pub fn normalize_slang(text: &str, dict: &HashMap<String, String>) -> String {
    text.split_whitespace()
        .map(|w| dict.get(w).map_or(w, String::as_str))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn tokenize(text: &str) -> TokenList {
    text.split_whitespace().map(str::to_string).collect()
}

pub fn remove_stopwords(tokens: TokenList, stoplist: &HashSet<String>) -> TokenList {
    tokens.into_iter().filter(|t| !stoplist.contains(t)).collect()
}

/// Runs the enabled steps in their fixed order.
pub fn run_pipeline(text: &str, cfg: &PreprocessConfig) -> TokenList {
    let s = cfg.steps;
    let mut text = if s.case_fold {
        case_fold(text)
    } else {
        text.to_string()
    };
    if s.clean {
        text = clean(&text);
    }
    if s.normalize {
        text = normalize_slang(&text, &cfg.slang);
    }
    let mut tokens = tokenize(&text);
    if s.stopwords {
        tokens = remove_stopwords(tokens, &cfg.stopwords);
    }
    if s.stem {
        tokens = tokens.iter().map(|t| cfg.stemmer.stem(t)).collect();
        if s.stopwords && cfg.stopwords_after_stem {
            tokens = remove_stopwords(tokens, &cfg.stopwords);
        }
    }
    tokens
}

/// [`run_pipeline`] over many documents in parallel; output order matches
/// input order.
pub fn run_batch<S: AsRef<str> + Sync>(texts: &[S], cfg: &PreprocessConfig) -> Vec<TokenList> {
    texts
        .par_iter()
        .map(|t| run_pipeline(t.as_ref(), cfg))
        .collect()
}
