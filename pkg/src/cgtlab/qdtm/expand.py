"""Query-term expansion into concept terms.

Three interchangeable scorers over the documents matching a query:
raw term frequency, pointwise KL contribution against the background
language model, and cosine similarity in a PPMI-SVD embedding space.
Rankings are deterministic: score descending, then query terms before
non-query terms, then ascending term id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import svds

from ..corpus import Corpus
from ..errors import ExpansionError
from ..seeds import mix_seed
from .query import Query

EPS = 1e-12
_STREAM_EMBED = 0x454D4244

METHODS = ("frequency", "kl", "embedding")


@dataclass(frozen=True)
class ConceptTermSet:
    query: Query
    method: str
    terms: tuple[tuple[str, float], ...]  # (term, weight), weights non-increasing
    skipped: tuple[str, ...] = ()  # out-of-vocabulary query terms

    @property
    def term_names(self) -> list[str]:
        return [t for t, _ in self.terms]

    def weight_map(self) -> dict[str, float]:
        return dict(self.terms)


def _query_ids(corpus: Corpus, query: Query) -> tuple[list[int], list[str]]:
    vocab = corpus.vocabulary
    ids = [vocab.id_for(t) for t in query.in_vocabulary(vocab)]
    skipped = query.out_of_vocabulary(vocab)
    if not ids:
        raise ExpansionError(
            f"query {query.label!r} has no terms in the corpus vocabulary"
        )
    return ids, skipped


def _matching_docs(corpus: Corpus, term_ids: list[int]) -> list[int]:
    wanted = set(term_ids)
    hits = [d.doc_id for d in corpus.documents if wanted.intersection(d.tokens.tolist())]
    if not hits:
        raise ExpansionError(f"no documents match query terms {sorted(wanted)}")
    return hits


def _select(
    corpus: Corpus,
    query: Query,
    method: str,
    scores: np.ndarray,
    query_ids: list[int],
    skipped: list[str],
    E: int,
) -> ConceptTermSet:
    """Keep all in-vocabulary query terms plus the top non-query terms up
    to E total, then rank the combined set."""
    qset = set(query_ids)
    order = np.lexsort((np.arange(len(scores)), -scores))
    chosen = list(query_ids)
    budget = max(E - len(query_ids), 0)
    for w in order:
        if budget == 0:
            break
        if int(w) not in qset:
            chosen.append(int(w))
            budget -= 1
    chosen.sort(key=lambda w: (-scores[w], w not in qset, w))
    vocab = corpus.vocabulary
    return ConceptTermSet(
        query=query,
        method=method,
        terms=tuple((vocab.terms[w], float(scores[w])) for w in chosen),
        skipped=tuple(skipped),
    )


def expand_frequency(corpus: Corpus, query: Query, E: int) -> ConceptTermSet:
    """Score terms by their frequency inside the matching documents."""
    qids, skipped = _query_ids(corpus, query)
    docs = _matching_docs(corpus, qids)
    V = len(corpus.vocabulary)
    counts = np.zeros(V, dtype=np.float64)
    for d in docs:
        np.add.at(counts, corpus.documents[d].tokens, 1)
    return _select(corpus, query, "frequency", counts, qids, skipped, E)


def expand_kl(corpus: Corpus, query: Query, E: int) -> ConceptTermSet:
    """Score terms by their pointwise KL contribution between the
    query-relevant language model and the whole-corpus model:
    p(w|Dq) * log(p(w|Dq) / p(w|corpus))."""
    qids, skipped = _query_ids(corpus, query)
    docs = _matching_docs(corpus, qids)
    V = len(corpus.vocabulary)
    counts = np.zeros(V, dtype=np.float64)
    for d in docs:
        np.add.at(counts, corpus.documents[d].tokens, 1)
    p_q = counts / counts.sum()
    p_bg = corpus.vocabulary.term_freq / corpus.vocabulary.term_freq.sum()
    scores = p_q * np.log((p_q + EPS) / (p_bg + EPS))
    scores[counts == 0] = 0.0
    return _select(corpus, query, "kl", scores, qids, skipped, E)


def _ppmi_matrix(corpus: Corpus, window: int = 5):
    V = len(corpus.vocabulary)
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    for doc in corpus.documents:
        toks = doc.tokens
        for off in range(1, min(window, len(toks) - 1) + 1):
            a, b = toks[:-off], toks[off:]
            rows.append(a)
            cols.append(b)
            rows.append(b)
            cols.append(a)
    if not rows:
        raise ExpansionError("corpus too small for co-occurrence statistics")
    r = np.concatenate(rows).astype(np.int64)
    c = np.concatenate(cols).astype(np.int64)
    counts = coo_matrix((np.ones(len(r)), (r, c)), shape=(V, V)).tocsr()
    counts.sum_duplicates()
    total = counts.sum()
    row_marg = np.asarray(counts.sum(axis=1)).ravel()
    col_marg = np.asarray(counts.sum(axis=0)).ravel()
    data = counts.data.copy()
    coo = counts.tocoo()
    pmi = np.log(coo.data * total / (row_marg[coo.row] * col_marg[coo.col]))
    pmi[pmi < 0] = 0.0
    out = coo_matrix((pmi, (coo.row, coo.col)), shape=(V, V)).tocsr()
    out.eliminate_zeros()
    if out.nnz == 0:
        raise ExpansionError("all-zero PPMI matrix; no usable co-occurrence signal")
    return out


def embed_terms(corpus: Corpus, dim: int, seed: int, window: int = 5) -> np.ndarray:
    """PPMI + truncated SVD term embedding, deterministic given seed.

    Sign convention: each left singular vector is flipped so its
    largest-magnitude entry is positive."""
    V = len(corpus.vocabulary)
    ppmi = _ppmi_matrix(corpus, window)
    k = min(dim, V - 1)
    rng = np.random.Generator(np.random.PCG64(mix_seed(seed, _STREAM_EMBED)))
    if k >= V - 1 and V <= 512:
        u, s, _ = np.linalg.svd(ppmi.toarray(), full_matrices=False)
        u, s = u[:, :k], s[:k]
    else:
        v0 = rng.standard_normal(V)
        u, s, _ = svds(ppmi, k=k, v0=v0)
        order = np.argsort(-s)
        u, s = u[:, order], s[order]
    for j in range(u.shape[1]):
        pivot = np.argmax(np.abs(u[:, j]))
        if u[pivot, j] < 0:
            u[:, j] = -u[:, j]
    return u * np.sqrt(np.maximum(s, 0.0))


def expand_embedding(
    corpus: Corpus, query: Query, E: int, dim: int = 100, seed: int = 0
) -> ConceptTermSet:
    """Score terms by cosine similarity to the mean query-term vector in
    the PPMI-SVD embedding."""
    V = len(corpus.vocabulary)
    if dim > V:
        raise ExpansionError(f"embedding dim {dim} exceeds vocabulary size {V}")
    qids, skipped = _query_ids(corpus, query)
    vectors = embed_terms(corpus, dim, seed)
    qvec = vectors[qids].mean(axis=0)
    qnorm = np.linalg.norm(qvec)
    if qnorm == 0:
        raise ExpansionError(
            f"query {query.label!r} has no co-occurrence signal in the embedding"
        )
    norms = np.linalg.norm(vectors, axis=1)
    scores = np.zeros(V, dtype=np.float64)
    nz = norms > 0
    scores[nz] = vectors[nz] @ qvec / (norms[nz] * qnorm)
    return _select(corpus, query, "embedding", scores, qids, skipped, E)


def expand(corpus: Corpus, query: Query, method: str, E: int,
           dim: int = 100, seed: int = 0) -> ConceptTermSet:
    if method == "frequency":
        return expand_frequency(corpus, query, E)
    if method == "kl":
        return expand_kl(corpus, query, E)
    if method == "embedding":
        return expand_embedding(corpus, query, E, dim=dim, seed=seed)
    raise ExpansionError(f"unknown expansion method {method!r}")
