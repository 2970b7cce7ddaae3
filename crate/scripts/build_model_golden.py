"""Golden fixtures for the classical baselines (scikit-learn) and the LSTM
classifier (torch autograd).

Writes crates/core/tests/data/{sklearn_golden,torch_lstm_golden}.json.
"""
import json
import pathlib
import random

import numpy as np
import torch
from sklearn.feature_extraction.text import TfidfVectorizer, CountVectorizer
from sklearn.linear_model import LogisticRegression
from sklearn.naive_bayes import MultinomialNB

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates/core/tests/data"
WORDS = ["bagus", "buruk", "makan", "enak", "gizi", "anak", "sekolah", "program",
         "mahal", "basi", "sehat", "gratis", "korupsi", "dukung", "tolak"]


def corpus(rng, n):
    docs, labels = [], []
    for _ in range(n):
        y = rng.random() < 0.4
        k = rng.randint(1, 8)
        pool = WORDS[:8] if y else WORDS[4:]
        docs.append([rng.choice(pool) for _ in range(k)])
        labels.append(int(y))
    return docs, labels


def sklearn_golden():
    rng = random.Random(17)
    train, ytr = corpus(rng, 60)
    test, _ = corpus(rng, 20)
    test.append(["tidakada"])
    test.append([])
    ident = dict(analyzer=lambda d: d, lowercase=False)
    tf = TfidfVectorizer(**ident)
    xtr = tf.fit_transform(train)
    xte = tf.transform(test)
    cv = CountVectorizer(**ident)
    ctr = cv.fit_transform(train)
    nb = MultinomialNB(alpha=1.0).fit(ctr, ytr)
    lam = 1e-2
    n = len(train)
    lr = LogisticRegression(C=1.0 / (lam * n), tol=1e-12, max_iter=100000).fit(xtr, ytr)
    w, b = lr.coef_[0], lr.intercept_[0]
    z = xtr @ w + b
    s = np.where(np.array(ytr) == 1, 1.0, -1.0)
    obj = float(np.mean(np.logaddexp(0, -s * z)) + 0.5 * lam * w @ w)

    def dense(m):
        return [[float(v) for v in row] for row in m.toarray()]

    return {
        "train": train,
        "train_labels": ytr,
        "test": test,
        "terms": list(tf.get_feature_names_out()),
        "idf": [float(v) for v in tf.idf_],
        "tfidf_test": dense(xte),
        "nb_proba_test": [[float(v) for v in r] for r in nb.predict_proba(cv.transform(test))],
        "lr_lambda": lam,
        "lr_objective": obj,
    }


def lstm_case(rng, seed):
    torch.manual_seed(seed)
    V, E, H = rng.randint(2, 8), rng.randint(1, 4), rng.randint(1, 4)
    emb = torch.nn.Embedding(V, E, padding_idx=0).double()
    lstm = torch.nn.LSTM(E, H, batch_first=True).double()
    fc = torch.nn.Linear(H, 2).double()
    for p in list(emb.parameters()) + list(lstm.parameters()) + list(fc.parameters()):
        torch.nn.init.uniform_(p, -1.0, 1.0)
    with torch.no_grad():
        emb.weight[0].zero_()
    n = rng.randint(1, 4)
    seqs, labels = [], []
    for _ in range(n):
        L = rng.randint(1, 5)
        seqs.append([rng.randint(1, V - 1) for _ in range(L)])
        labels.append(rng.randint(0, 1))
    losses, logits = [], []
    for seq, y in zip(seqs, labels):
        x = emb(torch.tensor([seq]))
        _, (h, _) = lstm(x)
        z = fc(h[-1])
        logits.append([float(v) for v in z.detach()[0]])
        losses.append(torch.nn.functional.cross_entropy(z, torch.tensor([y])))
    loss = torch.stack(losses).mean()
    loss.backward()
    params = [emb.weight, lstm.weight_ih_l0, lstm.weight_hh_l0, lstm.bias_ih_l0,
              lstm.bias_hh_l0, fc.weight, fc.bias]

    def flat(t):
        return [float(v) for v in t.detach().reshape(-1)]

    return {
        "dims": [V, E, H, 2],
        "seqs": seqs,
        "labels": labels,
        "params": [flat(p) for p in params],
        "logits": logits,
        "loss": float(loss.detach()),
        "grads": [flat(p.grad) for p in params],
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "sklearn_golden.json").write_text(json.dumps(sklearn_golden()) + "\n")
    rng = random.Random(5)
    cases = [lstm_case(rng, s) for s in range(25)]
    (OUT / "torch_lstm_golden.json").write_text(json.dumps(cases) + "\n")


if __name__ == "__main__":
    main()
