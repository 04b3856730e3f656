"""Model-selection metrics over trained topic models.

Four signals: mean pairwise topic cosine (minimize), symmetric KL between
the singular-value spectrum and the length-weighted topic mass (minimize),
document co-occurrence coherence (maximize), and sliding-window NPMI
context-vector coherence (maximize).
"""

from __future__ import annotations

import math

import numpy as np

from ..corpus import Corpus
from ..errors import ConfigError, MetricError
from ..lda import TopicModel, top_terms

EPS = 1e-12


def cao_metric(phi: np.ndarray) -> float:
    """Mean pairwise cosine similarity between topic-word rows.

    Cosines come from the Gram matrix so that exact-rational inputs give
    exact answers (norms are never rounded before the ratio)."""
    phi = np.asarray(phi, dtype=np.float64)
    K = phi.shape[0]
    if K < 2:
        raise MetricError("pairwise cosine needs at least 2 topics")
    gram = phi @ phi.T
    total = 0.0
    for i in range(K):
        for j in range(i + 1, K):
            total += float(gram[i, j]) / math.sqrt(float(gram[i, i]) * float(gram[j, j]))
    return total / (K * (K - 1) / 2)


def arun_metric(phi: np.ndarray, theta: np.ndarray, doc_lengths: np.ndarray) -> float:
    """Symmetric KL between the normalized singular spectrum of phi and
    the normalized, sorted length-weighted topic distribution."""
    phi = np.asarray(phi, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    K, V = phi.shape
    if K < 2:
        raise MetricError("spectrum divergence needs at least 2 topics")
    if K > V:
        raise ConfigError(f"K={K} exceeds vocabulary size {V}")
    c1 = np.sort(np.linalg.svd(phi, compute_uv=False))[::-1]
    c1 = c1 / c1.sum()
    c2 = np.sort(np.asarray(doc_lengths, dtype=np.float64) @ theta)[::-1]
    c2 = c2 / c2.sum()
    kl12 = float(np.sum(c1 * np.log((c1 + EPS) / (c2 + EPS))))
    kl21 = float(np.sum(c2 * np.log((c2 + EPS) / (c1 + EPS))))
    return kl12 + kl21


def _doc_sets(corpus: Corpus, term_ids: set[int]) -> dict[int, set[int]]:
    sets: dict[int, set[int]] = {t: set() for t in term_ids}
    for doc in corpus.documents:
        for t in set(doc.tokens.tolist()) & term_ids:
            sets[t].add(doc.doc_id)
    return sets


def _top_present_words(
    model: TopicModel, corpus: Corpus, topic: int, top_n: int
) -> list[int]:
    """Top-n topic words restricted to terms that occur in the corpus.

    Smoothing gives positive weight to every term, including ones a
    (synthetic) corpus never realized; those carry no co-occurrence
    evidence, so ranking skips them."""
    df = corpus.vocabulary.doc_freq
    picked = []
    for t in top_terms(model, topic, model.V):
        if df[t.term_id] > 0:
            picked.append(t.term_id)
            if len(picked) == top_n:
                break
    return picked


def umass_coherence(
    model: TopicModel, corpus: Corpus, top_n: int = 10
) -> tuple[list[float], float]:
    """Document co-occurrence coherence per topic and its mean.

    For top words v_1..v_M by descending weight:
    sum over m=2..M, l<m of log((D(v_m, v_l) + 1) / D(v_l)).
    """
    if top_n < 2:
        raise MetricError("coherence needs top_n >= 2")
    word_lists = [
        _top_present_words(model, corpus, k, top_n) for k in range(model.K)
    ]
    return umass_score_wordsets(corpus, word_lists)


def umass_score_wordsets(
    corpus: Corpus, word_lists: list[list[int]]
) -> tuple[list[float], float]:
    needed = set().union(*map(set, word_lists)) if word_lists else set()
    docs_of = _doc_sets(corpus, needed)
    scores = []
    for words in word_lists:
        s = 0.0
        for m in range(1, len(words)):
            for l in range(m):
                d_l = len(docs_of[words[l]])
                if d_l == 0:
                    raise MetricError(
                        f"top word id {words[l]} occurs in no document"
                    )
                cooc = len(docs_of[words[m]] & docs_of[words[l]])
                s += math.log((cooc + 1) / d_l)
        scores.append(s)
    return scores, float(np.mean(scores)) if scores else 0.0


def _window_counts(
    corpus: Corpus, union_words: list[int], window: int
) -> tuple[int, np.ndarray, np.ndarray]:
    """Boolean sliding-window counts: total windows, per-word window
    counts, and pairwise joint window counts. Documents shorter than the
    window contribute a single window."""
    T = len(union_words)
    lookup = np.full(len(corpus.vocabulary), -1, dtype=np.int64)
    lookup[np.asarray(union_words, dtype=np.int64)] = np.arange(T)
    n_windows = 0
    occ = np.zeros(T, dtype=np.int64)
    joint = np.zeros((T, T), dtype=np.int64)
    for doc in corpus.documents:
        L = len(doc)
        if L == 0:
            continue
        W = max(L - window + 1, 1)
        n_windows += W
        ui = lookup[doc.tokens]
        rows = np.nonzero(ui >= 0)[0]
        if rows.size == 0:
            continue
        onehot = np.zeros((L + 1, T), dtype=np.int32)
        onehot[rows + 1, ui[rows]] = 1
        cum = np.cumsum(onehot, axis=0)
        if L <= window:
            win = (cum[L] - cum[0] > 0)[None, :]
        else:
            win = (cum[window:] - cum[:-window]) > 0
        occ += win.sum(axis=0)
        w64 = win.astype(np.int64)
        joint += w64.T @ w64
    return n_windows, occ, joint


def _npmi_matrix(
    idx: np.ndarray, n_windows: int, occ: np.ndarray, joint: np.ndarray
) -> np.ndarray:
    """NPMI context vectors for one topic's words (rows index words).

    Conventions: diagonal is 1; any zero marginal or joint count gives -1;
    a pair present in every window gives 1."""
    M = len(idx)
    U = np.empty((M, M), dtype=np.float64)
    for a in range(M):
        for b in range(M):
            if a == b:
                U[a, b] = 1.0
                continue
            ci, cj, cij = occ[idx[a]], occ[idx[b]], joint[idx[a], idx[b]]
            if ci == 0 or cj == 0 or cij == 0:
                U[a, b] = -1.0
            elif cij == n_windows:
                U[a, b] = 1.0
            else:
                pij = cij / n_windows
                pi = ci / n_windows
                pj = cj / n_windows
                val = math.log((pij + EPS) / (pi * pj + EPS)) / -math.log(pij + EPS)
                U[a, b] = min(1.0, max(-1.0, val))
    return U


def cv_coherence(
    model: TopicModel, corpus: Corpus, top_n: int = 10, window: int = 110
) -> tuple[list[float], float]:
    """Sliding-window NPMI coherence per topic and its mean: cosine of
    each word's NPMI context vector against the sum of all of them."""
    if top_n < 2:
        raise MetricError("coherence needs top_n >= 2")
    if window < 1:
        raise MetricError("window must be >= 1")
    word_lists = [
        _top_present_words(model, corpus, k, top_n) for k in range(model.K)
    ]
    return cv_score_wordsets(corpus, word_lists, window)


def cv_score_wordsets(
    corpus: Corpus, word_lists: list[list[int]], window: int = 110
) -> tuple[list[float], float]:
    union_words = sorted(set().union(*map(set, word_lists))) if word_lists else []
    pos = {w: i for i, w in enumerate(union_words)}
    n_windows, occ, joint = _window_counts(corpus, union_words, window)
    scores = []
    for words in word_lists:
        idx = np.array([pos[w] for w in words], dtype=np.int64)
        U = _npmi_matrix(idx, n_windows, occ, joint)
        u_star = U.sum(axis=0)
        norm_star = np.linalg.norm(u_star)
        cos = []
        for a in range(len(words)):
            na = np.linalg.norm(U[a])
            if na == 0 or norm_star == 0:
                cos.append(0.0)
            else:
                cos.append(float(U[a] @ u_star / (na * norm_star)))
        scores.append(float(np.mean(cos)))
    return scores, float(np.mean(scores)) if scores else 0.0
