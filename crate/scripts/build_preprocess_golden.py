"""Golden output of `sentimen preprocess` on the CLI toy corpus, computed
with an independent Python implementation of each step and the Sastrawi
reference stemmer over the bundled dictionaries.

Writes crates/cli/tests/data/toy_preprocessed.csv.
"""
import csv
import pathlib
import re

from Sastrawi.Stemmer.Stemmer import Stemmer

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "crates/core/data"
CLI = ROOT / "crates/cli/tests/data"

URL = re.compile(r"(?i)(?:[a-z][a-z0-9+.\-]*://|\bwww\.)\S*")
TAG = re.compile(r"[@#]\w+")


class SetDictionary:
    def __init__(self, words):
        self.words = set(words)

    def contains(self, word):
        return word in self.words


def word_list(path):
    return {l.strip().lower() for l in path.read_text().splitlines() if l.strip()}


def slang_map(path):
    out = {}
    for line in path.read_text().splitlines():
        if line.strip():
            k, v = line.split("\t", 1)
            out[k.strip()] = v.strip()
    return out


def clean(text):
    text = TAG.sub(" ", URL.sub(" ", text))
    kept = "".join(c for c in text if "a" <= c <= "z" or c.isspace())
    return " ".join(kept.split())


def pipeline(text, slang, stop, stemmer):
    text = clean(text.lower())
    text = " ".join(slang.get(w, w) for w in text.split())
    tokens = [t for t in text.split() if t not in stop]
    stems = [stemmer.stem_word(t) for t in tokens]
    return [s for s in stems if s not in stop]


def main():
    stemmer = Stemmer(SetDictionary(word_list(DATA / "root_words.txt")))
    slang = slang_map(DATA / "slang_id.tsv")
    stop = word_list(DATA / "stopwords_id.txt")
    with open(CLI / "toy_corpus.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    with open(CLI / "toy_preprocessed.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "source", "text", "label", "tokens"])
        for r in rows:
            toks = pipeline(r["text"], slang, stop, stemmer)
            w.writerow([r["id"], r["source"], r["text"], r["label"], " ".join(toks)])


if __name__ == "__main__":
    main()
