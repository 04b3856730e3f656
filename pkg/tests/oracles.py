"""Independent brute-force implementations used as test oracles.

These recompute the selection metrics from first principles (explicit
loops, python sets, literal window enumeration) and share no code with
the library paths they check.
"""

from __future__ import annotations

import math

import numpy as np

from cgtlab.corpus import Corpus, Document, Vocabulary


def brute_cao(phi):
    K = len(phi)
    sims = []
    for i in range(K):
        for j in range(i + 1, K):
            dot = sum(a * b for a, b in zip(phi[i], phi[j]))
            ni = math.sqrt(sum(a * a for a in phi[i]))
            nj = math.sqrt(sum(b * b for b in phi[j]))
            sims.append(dot / (ni * nj))
    return sum(sims) / len(sims)


def brute_arun(phi, theta, lengths):
    phi = np.asarray(phi, dtype=float)
    # singular values via the eigenvalues of the Gram matrix
    eigvals = np.linalg.eigvalsh(phi @ phi.T)
    sv = np.sqrt(np.clip(eigvals, 0, None))
    c1 = sorted(sv.tolist(), reverse=True)
    s1 = sum(c1)
    c1 = [x / s1 for x in c1]
    c2 = [sum(lengths[d] * theta[d][k] for d in range(len(theta)))
          for k in range(len(theta[0]))]
    c2 = sorted(c2, reverse=True)
    s2 = sum(c2)
    c2 = [x / s2 for x in c2]
    eps = 1e-12
    kl12 = sum(a * math.log((a + eps) / (b + eps)) for a, b in zip(c1, c2))
    kl21 = sum(b * math.log((b + eps) / (a + eps)) for a, b in zip(c1, c2))
    return kl12 + kl21


def brute_umass(docs, word_lists):
    def containing(w):
        return {i for i, d in enumerate(docs) if w in d}

    scores = []
    for words in word_lists:
        s = 0.0
        for m in range(1, len(words)):
            for l in range(m):
                cooc = len(containing(words[m]) & containing(words[l]))
                s += math.log((cooc + 1) / len(containing(words[l])))
        scores.append(s)
    return scores, sum(scores) / len(scores)


def brute_cv(docs, word_lists, window):
    windows = []
    for d in docs:
        if len(d) == 0:
            continue
        if len(d) <= window:
            windows.append(set(d))
        else:
            for s in range(len(d) - window + 1):
                windows.append(set(d[s:s + window]))
    n = len(windows)

    def p(*ws):
        return sum(1 for win in windows if all(w in win for w in ws)) / n

    def npmi(a, b):
        if a == b:
            return 1.0
        pij, pi, pj = p(a, b), p(a), p(b)
        if pi == 0 or pj == 0 or pij == 0:
            return -1.0
        if pij == 1.0:
            return 1.0
        val = math.log((pij + 1e-12) / (pi * pj + 1e-12)) / -math.log(pij + 1e-12)
        return min(1.0, max(-1.0, val))

    scores = []
    for words in word_lists:
        vectors = [[npmi(a, b) for b in words] for a in words]
        star = [sum(col) for col in zip(*vectors)]
        ns = math.sqrt(sum(x * x for x in star))
        cos = []
        for vec in vectors:
            nv = math.sqrt(sum(x * x for x in vec))
            if nv == 0 or ns == 0:
                cos.append(0.0)
            else:
                cos.append(sum(a * b for a, b in zip(vec, star)) / (nv * ns))
        scores.append(sum(cos) / len(cos))
    return scores, sum(scores) / len(scores)


def make_corpus(token_lists, vocab_size) -> Corpus:
    docs = tuple(
        Document(doc_id=i, source_id=f"d{i}",
                 tokens=np.array(toks, dtype=np.int32))
        for i, toks in enumerate(token_lists)
    )
    terms = tuple(f"t{i}" for i in range(vocab_size))
    tf = np.zeros(vocab_size, dtype=np.int64)
    df = np.zeros(vocab_size, dtype=np.int64)
    for toks in token_lists:
        for t in toks:
            tf[t] += 1
        for t in set(toks):
            df[t] += 1
    vocab = Vocabulary(terms=terms, term_to_id={t: i for i, t in enumerate(terms)},
                       term_freq=tf, doc_freq=df)
    return Corpus(documents=docs, vocabulary=vocab)
