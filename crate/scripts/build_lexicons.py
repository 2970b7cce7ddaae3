"""Regenerate the bundled lexicon files under crates/core/data.

Sources:
  root_words.txt  - Sastrawi 1.0.1 `kata-dasar.txt` (malformed line `oper "v,"` dropped)
  stopwords_id.txt - stopwords-iso `id` list (Tala 2003 list, 758 entries; same list NLTK ships)
  slang_id.tsv    - Kamus Alay colloquial Indonesian lexicon (Salsabila et al., 2018), as packaged
                    by indoNLP; filtered to single-word [a-z]+ keys whose standard form is one or
                    more [a-z]+ words, excluding keys that are root words or stopwords and entries
                    whose standard form contains another key (keeps normalization a fixpoint).
"""
import os
import re

import stopwordsiso
from indoNLP.preprocessing.slang_data import SLANG_DATA
import Sastrawi

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "crates", "core", "data")

word = re.compile(r"^[a-z]+$")
phrase = re.compile(r"^[a-z]+( [a-z]+)*$")


def main():
    src = os.path.join(os.path.dirname(Sastrawi.__file__), "Stemmer", "data", "kata-dasar.txt")
    with open(src) as f:
        roots = [w for w in f.read().split("\n") if w.strip() and re.match(r"^[a-z-]+$", w)]
    with open(os.path.join(OUT, "root_words.txt"), "w") as f:
        f.write("\n".join(roots) + "\n")

    stops = sorted(stopwordsiso.stopwords("id"))
    with open(os.path.join(OUT, "stopwords_id.txt"), "w") as f:
        f.write("\n".join(stops) + "\n")

    rootset, stopset = set(roots), set(stops)
    cand = {}
    for k, v in SLANG_DATA.items():
        k, v = k.strip().lower(), v.strip().lower()
        if not word.match(k) or not phrase.match(v) or k == v:
            continue
        if k in rootset or k in stopset:
            continue
        cand[k] = v
    slang = {k: v for k, v in cand.items() if not any(t in cand for t in v.split(" "))}
    with open(os.path.join(OUT, "slang_id.tsv"), "w") as f:
        for k in sorted(slang):
            f.write(f"{k}\t{slang[k]}\n")
    print(len(roots), len(stops), len(slang))


if __name__ == "__main__":
    main()
