//! Dictionary-driven Indonesian stemmer in the Nazief–Adriani family
//! (confix stripping with the enhanced precedence and suffix-restoration
//! rules), rule-for-rule compatible with the Sastrawi reference stemmer.
//!
//! The outline: a word already in the root dictionary is returned as is.
//! Otherwise inflectional particles (-lah, -kah, -tah, -pun), possessive
//! pronouns (-ku, -mu, -nya) and derivational suffixes (-i, -kan, -an, plus
//! the loan suffixes -is, -isme, -isasi) are stripped, then up to three
//! rounds of derivational prefixes (di-, ke-, se-, and the recoding rules
//! for me-, be-, pe-, te- allomorphs). The dictionary is consulted after
//! every removal. Words matching be-…-lah, be-…-an, me-…-i, di-…-i, pe-…-i
//! or ter-…-i try prefixes before suffixes first. When nothing matches,
//! previously removed suffixes are restored one by one and prefix removal
//! is retried. A word that never reaches a dictionary entry is returned
//! unchanged.

use std::collections::HashSet;

const VOWELS: &[u8] = b"aiueo";
const CONSONANTS: &[u8] = b"bcdfghjklmnpqrstvwxyz";

#[derive(Debug, Clone)]
pub struct Stemmer {
    roots: HashSet<String>,
}

impl Stemmer {
    pub fn new<I, S>(roots: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let roots = roots
            .into_iter()
            .map(Into::into)
            .filter(|w: &String| !w.trim().is_empty())
            .collect();
        Self { roots }
    }

    pub fn is_root(&self, word: &str) -> bool {
        self.roots.contains(word)
    }

    pub fn root_count(&self) -> usize {
        self.roots.len()
    }

    /// Stems one word. Total: unknown words come back unchanged.
    pub fn stem(&self, word: &str) -> String {
        if is_plural(word) {
            self.stem_plural(word)
        } else {
            self.stem_singular(word)
        }
    }

    // Reduplicated forms such as `berbalas-balasan` stem both halves and
    // accept the root only when they agree.
    fn stem_plural(&self, plural: &str) -> String {
        let Some((left, right)) = plural.rsplit_once('-') else {
            return plural.to_string();
        };
        let (mut first, mut second) = (left.to_string(), right.to_string());
        const SUFFIXES: [&str; 7] = ["ku", "mu", "nya", "lah", "kah", "tah", "pun"];
        if SUFFIXES.contains(&right) {
            if let Some((a, b)) = left.rsplit_once('-') {
                first = a.to_string();
                second = format!("{b}-{right}");
            }
        }
        let root1 = self.stem_singular(&first);
        let mut root2 = self.stem_singular(&second);
        if !self.is_root(&second) && root2 == second {
            root2 = self.stem_singular(&format!("me{second}"));
        }
        if root1 == root2 {
            root1
        } else {
            plural.to_string()
        }
    }

    fn stem_singular(&self, word: &str) -> String {
        let mut ctx = Context {
            roots: &self.roots,
            original: word.to_string(),
            current: word.to_string(),
            removals: Vec::new(),
            stopped: false,
        };
        ctx.run();
        if ctx.found() {
            ctx.current
        } else {
            ctx.original
        }
    }
}

fn is_plural(word: &str) -> bool {
    // `nikmat-ku` style suffixes attached with a hyphen are not plurals
    if let Some((head, tail)) = word.rsplit_once('-') {
        if matches!(tail, "ku" | "mu" | "nya" | "lah" | "kah" | "tah" | "pun") {
            return head.contains('-');
        }
    }
    word.contains('-')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Affix {
    Particle,
    Possessive,
    DerivationalSuffix,
    DerivationalPrefix,
}

impl Affix {
    fn is_suffix(self) -> bool {
        self != Affix::DerivationalPrefix
    }
}

#[derive(Debug, Clone)]
struct Removal {
    subject: String,
    result: String,
    removed: String,
    affix: Affix,
}

#[derive(Clone, Copy)]
enum Suffix {
    Particle,
    Possessive,
    Derivational,
}

const SUFFIX_PASSES: [Suffix; 3] = [Suffix::Particle, Suffix::Possessive, Suffix::Derivational];

type Rule = fn(&str) -> Option<String>;

enum PrefixPass {
    Plain,
    Disambiguate(&'static [Rule]),
}

struct Context<'a> {
    roots: &'a HashSet<String>,
    original: String,
    current: String,
    removals: Vec<Removal>,
    stopped: bool,
}

impl Context<'_> {
    fn found(&self) -> bool {
        self.roots.contains(&self.current)
    }

    fn run(&mut self) {
        if self.found() {
            return;
        }
        if self.current.chars().count() <= 3 {
            // short words still get one particle and one plain-prefix attempt
            self.stopped = true;
        }
        if self.found() {
            return;
        }

        if prefix_first(&self.original) {
            self.remove_prefixes();
            if self.found() {
                return;
            }
            self.remove_suffixes();
            if self.found() {
                return;
            }
            self.current = self.original.clone();
            self.removals.clear();
        }

        self.remove_suffixes();
        if self.found() {
            return;
        }
        self.remove_prefixes();
        if self.found() {
            return;
        }
        self.restore_suffixes();
    }

    fn record(&mut self, result: String, affix: Affix) {
        let removed = self.current.replacen(result.as_str(), "", 1);
        let subject = std::mem::replace(&mut self.current, result.clone());
        self.removals.push(Removal {
            subject,
            result,
            removed,
            affix,
        });
    }

    fn remove_suffixes(&mut self) {
        for pass in SUFFIX_PASSES {
            let (result, affix) = match pass {
                Suffix::Particle => (strip_particle(&self.current), Affix::Particle),
                Suffix::Possessive => (strip_possessive(&self.current), Affix::Possessive),
                Suffix::Derivational => {
                    (strip_derivational(&self.current), Affix::DerivationalSuffix)
                }
            };
            if result != self.current {
                self.record(result, affix);
            }
            if self.found() || self.stopped {
                return;
            }
        }
    }

    fn remove_prefixes(&mut self) {
        for _ in 0..3 {
            self.prefix_round();
            if self.found() {
                return;
            }
        }
    }

    // One round stops at the first pass that removes something.
    fn prefix_round(&mut self) {
        let before = self.removals.len();
        for pass in PREFIX_PASSES {
            match pass {
                PrefixPass::Plain => {
                    let result = strip_plain_prefix(&self.current);
                    if result != self.current {
                        self.record(result, Affix::DerivationalPrefix);
                    }
                }
                PrefixPass::Disambiguate(rules) => {
                    let mut result = None;
                    for rule in *rules {
                        result = rule(&self.current);
                        if result.as_ref().is_some_and(|r| self.roots.contains(r)) {
                            break;
                        }
                    }
                    // the last candidate tried is applied even when it is
                    // not a root
                    if let Some(r) = result.filter(|r| !r.is_empty()) {
                        self.record(r, Affix::DerivationalPrefix);
                    }
                }
            }
            if self.found() || self.stopped || self.removals.len() > before {
                return;
            }
        }
    }

    fn restore_suffixes(&mut self) {
        if let Some(first) = self.removals.first() {
            self.current = first.subject.clone();
        }
        // Drops prefix removals with the reference implementation's
        // remove-while-iterating behaviour: the entry after a dropped one
        // is skipped.
        let mut i = 0;
        while i < self.removals.len() {
            if self.removals[i].affix == Affix::DerivationalPrefix {
                self.removals.remove(i);
            }
            i += 1;
        }

        let snapshot: Vec<Removal> = self.removals.clone();
        let saved = self.current.clone();
        for removal in snapshot.iter().rev() {
            if !removal.affix.is_suffix() {
                continue;
            }
            if removal.removed == "kan" {
                self.current = format!("{}k", removal.result);
                self.remove_prefixes();
                if self.found() {
                    return;
                }
                self.current = format!("{}kan", removal.result);
            } else {
                self.current = removal.subject.clone();
            }
            self.remove_prefixes();
            if self.found() {
                return;
            }
            self.current = saved.clone();
        }
    }
}

fn prefix_first(word: &str) -> bool {
    const PAIRS: [(&str, &str); 6] = [
        ("be", "lah"),
        ("be", "an"),
        ("me", "i"),
        ("di", "i"),
        ("pe", "i"),
        ("ter", "i"),
    ];
    PAIRS.iter().any(|(p, s)| {
        word.len() >= p.len() + s.len() && word.starts_with(p) && word.ends_with(s)
    })
}

/// Strips one trailing suffix from `options` together with any hyphens
/// directly before it.
fn strip_hyphenated(word: &str, options: &[&str]) -> String {
    for s in options {
        if let Some(stem) = word.strip_suffix(s) {
            return stem.trim_end_matches('-').to_string();
        }
    }
    word.to_string()
}

fn strip_particle(word: &str) -> String {
    strip_hyphenated(word, &["lah", "kah", "tah", "pun"])
}

fn strip_possessive(word: &str) -> String {
    strip_hyphenated(word, &["ku", "mu", "nya"])
}

fn strip_derivational(word: &str) -> String {
    // the longest matching alternative wins
    for s in ["isasi", "isme", "kan", "is", "an", "i"] {
        if let Some(stem) = word.strip_suffix(s) {
            return stem.to_string();
        }
    }
    word.to_string()
}

fn strip_plain_prefix(word: &str) -> String {
    for p in ["di", "ke", "se"] {
        if let Some(rest) = word.strip_prefix(p) {
            return rest.to_string();
        }
    }
    word.to_string()
}

fn byte_in(w: &str, i: usize, class: &[u8]) -> bool {
    w.as_bytes().get(i).is_some_and(|b| class.contains(b))
}

fn lower(w: &str, i: usize) -> bool {
    w.as_bytes().get(i).is_some_and(u8::is_ascii_lowercase)
}

fn at(w: &str, i: usize, lit: &str) -> bool {
    w.as_bytes().get(i..i + lit.len()) == Some(lit.as_bytes())
}

fn tail(w: &str, i: usize) -> String {
    w[i..].to_string()
}

fn with(prefix: &str, w: &str, i: usize) -> String {
    format!("{prefix}{}", &w[i..])
}

fn r1a(w: &str) -> Option<String> {
    (w.starts_with("ber") && byte_in(w, 3, VOWELS)).then(|| tail(w, 3))
}
fn r1b(w: &str) -> Option<String> {
    (w.starts_with("ber") && byte_in(w, 3, VOWELS)).then(|| with("r", w, 3))
}
fn r2(w: &str) -> Option<String> {
    if !(w.starts_with("ber") && byte_in(w, 3, CONSONANTS) && lower(w, 4)) || at(w, 5, "er") {
        return None;
    }
    Some(tail(w, 3))
}
fn r3(w: &str) -> Option<String> {
    let ok = w.starts_with("ber")
        && byte_in(w, 3, CONSONANTS)
        && lower(w, 4)
        && at(w, 5, "er")
        && byte_in(w, 7, VOWELS);
    (ok && !at(w, 3, "r")).then(|| tail(w, 3))
}
fn r4(w: &str) -> Option<String> {
    (w == "belajar").then(|| "ajar".to_string())
}
fn r5(w: &str) -> Option<String> {
    let ok = w.starts_with("be")
        && byte_in(w, 2, b"bcdfghjklmnpqstvwxyz")
        && at(w, 3, "er")
        && byte_in(w, 5, CONSONANTS);
    ok.then(|| tail(w, 2))
}
fn r6a(w: &str) -> Option<String> {
    (w.starts_with("ter") && byte_in(w, 3, VOWELS)).then(|| tail(w, 3))
}
fn r6b(w: &str) -> Option<String> {
    (w.starts_with("ter") && byte_in(w, 3, VOWELS)).then(|| with("r", w, 3))
}
fn r7(w: &str) -> Option<String> {
    let ok = w.starts_with("ter")
        && byte_in(w, 3, CONSONANTS)
        && at(w, 4, "er")
        && byte_in(w, 6, VOWELS);
    (ok && !at(w, 3, "r")).then(|| tail(w, 3))
}
fn r8(w: &str) -> Option<String> {
    if !(w.starts_with("ter") && byte_in(w, 3, CONSONANTS)) || at(w, 3, "r") || at(w, 4, "er") {
        return None;
    }
    Some(tail(w, 3))
}
fn r9(w: &str) -> Option<String> {
    let ok = w.starts_with("te")
        && byte_in(w, 2, CONSONANTS)
        && at(w, 3, "er")
        && byte_in(w, 5, CONSONANTS);
    (ok && !at(w, 2, "r")).then(|| tail(w, 2))
}
fn r10(w: &str) -> Option<String> {
    (w.starts_with("me") && byte_in(w, 2, b"lrwy") && byte_in(w, 3, VOWELS)).then(|| tail(w, 2))
}
fn r11(w: &str) -> Option<String> {
    (w.starts_with("mem") && byte_in(w, 3, b"bfv")).then(|| tail(w, 3))
}
fn r12(w: &str) -> Option<String> {
    w.starts_with("mempe").then(|| tail(w, 3))
}
fn r13a(w: &str) -> Option<String> {
    (w.starts_with("mem") && byte_in(w, 3, VOWELS)).then(|| with("m", w, 3))
}
fn r13b(w: &str) -> Option<String> {
    (w.starts_with("mem") && byte_in(w, 3, VOWELS)).then(|| with("p", w, 3))
}
fn r14(w: &str) -> Option<String> {
    (w.starts_with("men") && byte_in(w, 3, b"cdjstz")).then(|| tail(w, 3))
}
fn r15a(w: &str) -> Option<String> {
    (w.starts_with("men") && byte_in(w, 3, VOWELS)).then(|| with("n", w, 3))
}
fn r15b(w: &str) -> Option<String> {
    (w.starts_with("men") && byte_in(w, 3, VOWELS)).then(|| with("t", w, 3))
}
fn r16(w: &str) -> Option<String> {
    // the reference character class is `[g|h|q|k]`, pipe included
    (w.starts_with("meng") && byte_in(w, 4, b"ghqk|")).then(|| tail(w, 4))
}
fn r17a(w: &str) -> Option<String> {
    (w.starts_with("meng") && byte_in(w, 4, VOWELS)).then(|| tail(w, 4))
}
fn r17b(w: &str) -> Option<String> {
    (w.starts_with("meng") && byte_in(w, 4, VOWELS)).then(|| with("k", w, 4))
}
fn r17c(w: &str) -> Option<String> {
    w.starts_with("menge").then(|| tail(w, 5))
}
fn r17d(w: &str) -> Option<String> {
    (w.starts_with("meng") && byte_in(w, 4, VOWELS)).then(|| with("ng", w, 4))
}
fn r18a(w: &str) -> Option<String> {
    (w.starts_with("meny") && byte_in(w, 4, VOWELS)).then(|| with("ny", w, 4))
}
fn r18b(w: &str) -> Option<String> {
    (w.starts_with("meny") && byte_in(w, 4, VOWELS)).then(|| with("s", w, 4))
}
fn r19(w: &str) -> Option<String> {
    (w.starts_with("memp") && byte_in(w, 4, b"abcdfghijklmopqrstuvwxyz")).then(|| tail(w, 3))
}
fn r20(w: &str) -> Option<String> {
    (w.starts_with("pe") && byte_in(w, 2, b"wy") && byte_in(w, 3, VOWELS)).then(|| tail(w, 2))
}
fn r21a(w: &str) -> Option<String> {
    (w.starts_with("per") && byte_in(w, 3, VOWELS)).then(|| tail(w, 3))
}
fn r21b(w: &str) -> Option<String> {
    (w.starts_with("per") && byte_in(w, 3, VOWELS)).then(|| tail(w, 2))
}
fn r23(w: &str) -> Option<String> {
    if !(w.starts_with("per") && byte_in(w, 3, CONSONANTS) && lower(w, 4)) || at(w, 5, "er") {
        return None;
    }
    Some(tail(w, 3))
}
fn r24(w: &str) -> Option<String> {
    let ok = w.starts_with("per")
        && byte_in(w, 3, CONSONANTS)
        && lower(w, 4)
        && at(w, 5, "er")
        && byte_in(w, 7, VOWELS);
    (ok && !at(w, 3, "r")).then(|| tail(w, 3))
}
fn r25(w: &str) -> Option<String> {
    (w.starts_with("pem") && byte_in(w, 3, b"bfv")).then(|| tail(w, 3))
}
fn r26a(w: &str) -> Option<String> {
    (w.starts_with("pem") && byte_in(w, 3, VOWELS)).then(|| with("m", w, 3))
}
fn r26b(w: &str) -> Option<String> {
    (w.starts_with("pem") && byte_in(w, 3, VOWELS)).then(|| with("p", w, 3))
}
fn r27(w: &str) -> Option<String> {
    (w.starts_with("pen") && byte_in(w, 3, b"cdjz")).then(|| tail(w, 3))
}
fn r28a(w: &str) -> Option<String> {
    (w.starts_with("pen") && byte_in(w, 3, VOWELS)).then(|| with("n", w, 3))
}
fn r28b(w: &str) -> Option<String> {
    (w.starts_with("pen") && byte_in(w, 3, VOWELS)).then(|| with("t", w, 3))
}
fn r29(w: &str) -> Option<String> {
    (w.starts_with("peng") && byte_in(w, 4, CONSONANTS)).then(|| tail(w, 4))
}
fn r30a(w: &str) -> Option<String> {
    (w.starts_with("peng") && byte_in(w, 4, VOWELS)).then(|| tail(w, 4))
}
fn r30b(w: &str) -> Option<String> {
    (w.starts_with("peng") && byte_in(w, 4, VOWELS)).then(|| with("k", w, 4))
}
fn r30c(w: &str) -> Option<String> {
    w.starts_with("penge").then(|| tail(w, 5))
}
fn r31a(w: &str) -> Option<String> {
    (w.starts_with("peny") && byte_in(w, 4, VOWELS)).then(|| with("ny", w, 4))
}
fn r31b(w: &str) -> Option<String> {
    (w.starts_with("peny") && byte_in(w, 4, VOWELS)).then(|| with("s", w, 4))
}
fn r32(w: &str) -> Option<String> {
    if w == "pelajar" {
        return Some("ajar".into());
    }
    (w.starts_with("pel") && byte_in(w, 3, VOWELS)).then(|| tail(w, 2))
}
fn r34(w: &str) -> Option<String> {
    if !(w.starts_with("pe") && byte_in(w, 2, CONSONANTS)) || at(w, 3, "er") {
        return None;
    }
    Some(tail(w, 2))
}
fn r35(w: &str) -> Option<String> {
    let ok = w.starts_with("ter")
        && byte_in(w, 3, b"bcdfghjkpqstvxz")
        && at(w, 4, "er")
        && byte_in(w, 6, CONSONANTS);
    ok.then(|| tail(w, 3))
}
fn r36(w: &str) -> Option<String> {
    let ok = w.starts_with("pe")
        && byte_in(w, 2, b"bcdfghjkpqstvxz")
        && at(w, 3, "er")
        && byte_in(w, 5, CONSONANTS);
    ok.then(|| tail(w, 2))
}

// Infix rules: C-er-V, C-el-V, C-em-V, C-in-V. The `a` variant keeps the
// word, the `b` variant drops the infix.
fn infix(w: &str, inf: &str) -> bool {
    byte_in(w, 0, CONSONANTS) && at(w, 1, inf) && byte_in(w, 3, VOWELS)
}
fn infix_keep(w: &str, inf: &str) -> Option<String> {
    infix(w, inf).then(|| w.to_string())
}
fn infix_drop(w: &str, inf: &str) -> Option<String> {
    infix(w, inf).then(|| format!("{}{}", &w[..1], &w[3..]))
}
fn r37a(w: &str) -> Option<String> {
    infix_keep(w, "er")
}
fn r37b(w: &str) -> Option<String> {
    infix_drop(w, "er")
}
fn r38a(w: &str) -> Option<String> {
    infix_keep(w, "el")
}
fn r38b(w: &str) -> Option<String> {
    infix_drop(w, "el")
}
fn r39a(w: &str) -> Option<String> {
    infix_keep(w, "em")
}
fn r39b(w: &str) -> Option<String> {
    infix_drop(w, "em")
}
fn r40a(w: &str) -> Option<String> {
    infix_keep(w, "in")
}
fn r40b(w: &str) -> Option<String> {
    infix_drop(w, "in")
}
fn r41(w: &str) -> Option<String> {
    w.strip_prefix("ku").map(str::to_string)
}
fn r42(w: &str) -> Option<String> {
    w.strip_prefix("kau").map(str::to_string)
}

const PREFIX_PASSES: &[PrefixPass] = &[
    PrefixPass::Plain,
    PrefixPass::Disambiguate(&[r1a, r1b]),
    PrefixPass::Disambiguate(&[r2]),
    PrefixPass::Disambiguate(&[r3]),
    PrefixPass::Disambiguate(&[r4]),
    PrefixPass::Disambiguate(&[r5]),
    PrefixPass::Disambiguate(&[r6a, r6b]),
    PrefixPass::Disambiguate(&[r7]),
    PrefixPass::Disambiguate(&[r8]),
    PrefixPass::Disambiguate(&[r9]),
    PrefixPass::Disambiguate(&[r10]),
    PrefixPass::Disambiguate(&[r11]),
    PrefixPass::Disambiguate(&[r12]),
    PrefixPass::Disambiguate(&[r13a, r13b]),
    PrefixPass::Disambiguate(&[r14]),
    PrefixPass::Disambiguate(&[r15a, r15b]),
    PrefixPass::Disambiguate(&[r16]),
    PrefixPass::Disambiguate(&[r17a, r17b, r17c, r17d]),
    PrefixPass::Disambiguate(&[r18a, r18b]),
    PrefixPass::Disambiguate(&[r19]),
    PrefixPass::Disambiguate(&[r20]),
    PrefixPass::Disambiguate(&[r21a, r21b]),
    PrefixPass::Disambiguate(&[r23]),
    PrefixPass::Disambiguate(&[r24]),
    PrefixPass::Disambiguate(&[r25]),
    PrefixPass::Disambiguate(&[r26a, r26b]),
    PrefixPass::Disambiguate(&[r27]),
    PrefixPass::Disambiguate(&[r28a, r28b]),
    PrefixPass::Disambiguate(&[r29]),
    PrefixPass::Disambiguate(&[r30a, r30b, r30c]),
    PrefixPass::Disambiguate(&[r31a, r31b]),
    PrefixPass::Disambiguate(&[r32]),
    PrefixPass::Disambiguate(&[r34]),
    PrefixPass::Disambiguate(&[r35]),
    PrefixPass::Disambiguate(&[r36]),
    PrefixPass::Disambiguate(&[r37a, r37b]),
    PrefixPass::Disambiguate(&[r38a, r38b]),
    PrefixPass::Disambiguate(&[r39a, r39b]),
    PrefixPass::Disambiguate(&[r40a, r40b]),
    PrefixPass::Disambiguate(&[r41]),
    PrefixPass::Disambiguate(&[r42]),
];

#[cfg(test)]
mod tests {
    use super::*;

    fn stemmer() -> Stemmer {
        Stemmer::new([
            "makan", "beri", "ajar", "tiru", "balas", "baca", "nyala", "sapu", "pengaruh", "kata",
        ])
    }

    #[test]
    fn dictionary_hit_is_identity() {
        assert_eq!(stemmer().stem("makan"), "makan");
    }

    #[test]
    fn suffix_and_prefix_removal() {
        let s = stemmer();
        assert_eq!(s.stem("makanan"), "makan");
        assert_eq!(s.stem("memberikan"), "beri");
        assert_eq!(s.stem("dibacakan"), "baca");
        assert_eq!(s.stem("mempengaruhi"), "pengaruh");
        assert_eq!(s.stem("pelajar"), "ajar");
        assert_eq!(s.stem("menyapu"), "sapu");
        assert_eq!(s.stem("menyala"), "nyala");
        assert_eq!(s.stem("katanya"), "kata");
    }

    #[test]
    fn unknown_word_returned_unchanged() {
        let s = stemmer();
        assert_eq!(s.stem("xyzzykan"), "xyzzykan");
        assert_eq!(s.stem(""), "");
        assert_eq!(s.stem("é"), "é");
    }

    #[test]
    fn reduplication() {
        let s = stemmer();
        assert_eq!(s.stem("berbalas-balasan"), "balas");
        assert_eq!(s.stem("meniru-nirukan"), "tiru");
        assert_eq!(s.stem("makan-minum"), "makan-minum");
    }

    #[test]
    fn derivational_suffix_prefers_longest() {
        assert_eq!(strip_derivational("makanan"), "makan");
        assert_eq!(strip_derivational("berikan"), "beri");
        assert_eq!(strip_derivational("modernisasi"), "modern");
        assert_eq!(strip_derivational("an"), "");
    }

    #[test]
    fn rule_fallthrough_applies_last_candidate() {
        // 13b is applied when neither recoding hits the dictionary
        let s = Stemmer::new(["zzz"]);
        let mut ctx = Context {
            roots: &s.roots,
            original: "memakan".into(),
            current: "memakan".into(),
            removals: vec![],
            stopped: false,
        };
        ctx.prefix_round();
        assert_eq!(ctx.current, "pakan");
    }
}
