"""Query-driven topic modeling: seeded main topics, HDP subtopics.

Phase 1 runs collapsed Gibbs over query topics plus background topics,
where each query topic's word prior carries pseudo-count mass spread over
its concept terms proportionally to expansion weight; concept-term tokens
start in their query's topic. A query's main document set is everything
with enough estimated mass on that topic. Phase 2 grows subtopics inside
each main set with the truncated HDP sampler and assigns every main-set
document to its dominant subtopic, merging undersized ones.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..corpus import Corpus
from ..errors import ConfigError, ExpansionError
from ..lda.gibbs import run_lda_seeded
from ..seeds import mix_seed
from ..selection.metrics import cv_score_wordsets
from .expand import METHODS, ConceptTermSet, expand
from .hdp import run_hdp
from .query import Query

_STREAM_QDTM = 0x51445431


@dataclass(frozen=True)
class QdtmConfig:
    method: str = "kl"
    expansion_size: int = 30  # E
    background_topics: int = 10  # B
    seed_boost: float = 50.0  # mu: pseudo-count mass per query topic
    relevance_threshold: float = 0.3  # tau
    gamma: float = 1.0
    alpha0: float = 1.0
    t_max: int = 10
    min_subtopic_docs: int = 5
    iterations: int = 500  # per phase
    alpha: float | None = None  # phase-1 doc-topic prior; default 50/K
    beta: float = 0.01
    embedding_dim: int = 100
    seed: int = 0

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}", field="method")
        if self.background_topics < 1:
            raise ConfigError("background_topics must be >= 1", field="background_topics")
        if self.seed_boost <= 0:
            raise ConfigError("seed_boost must be positive", field="seed_boost")
        if not (0 < self.relevance_threshold < 1):
            raise ConfigError("relevance_threshold must be in (0,1)", field="relevance_threshold")
        if self.t_max < 1:
            raise ConfigError("t_max must be >= 1", field="t_max")
        if self.iterations < 2:
            raise ConfigError("iterations must be >= 2", field="iterations")
        if self.expansion_size < 1:
            raise ConfigError("expansion_size must be >= 1", field="expansion_size")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "expansion_size": self.expansion_size,
            "background_topics": self.background_topics,
            "seed_boost": self.seed_boost,
            "relevance_threshold": self.relevance_threshold,
            "gamma": self.gamma,
            "alpha0": self.alpha0,
            "t_max": self.t_max,
            "min_subtopic_docs": self.min_subtopic_docs,
            "iterations": self.iterations,
            "alpha": self.alpha,
            "beta": self.beta,
            "embedding_dim": self.embedding_dim,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "QdtmConfig":
        return cls(**{k: obj[k] for k in cls.__dataclass_fields__ if k in obj})


@dataclass(frozen=True)
class HierarchyNode:
    node_id: str
    label: str
    term_dist: np.ndarray  # distribution over V
    doc_ids: tuple[int, ...]
    children: tuple["HierarchyNode", ...] = ()
    c_v: float | None = None


@dataclass(frozen=True)
class TopicHierarchy:
    mains: tuple[HierarchyNode, ...]
    background: np.ndarray  # B x V
    unmodelable: tuple[dict, ...]  # {"label": ..., "reason": ...}
    expansions: tuple[ConceptTermSet, ...]
    config: QdtmConfig
    corpus_digest: str

    def nodes(self) -> list[HierarchyNode]:
        out = []
        for m in self.mains:
            out.append(m)
            out.extend(m.children)
        return out

    def to_json(self, corpus: Corpus, top_n: int = 10) -> dict:
        vocab = corpus.vocabulary

        def node_json(n: HierarchyNode) -> dict:
            order = np.argsort(-n.term_dist, kind="stable")[:top_n]
            return {
                "node_id": n.node_id,
                "label": n.label,
                "top_terms": [
                    {"term": vocab.terms[i], "weight": float(n.term_dist[i])}
                    for i in order
                ],
                "doc_ids": list(n.doc_ids),
                "c_v": n.c_v,
                "judgment": None,
                "children": [node_json(c) for c in n.children],
            }

        return {
            "config": self.config.to_dict(),
            "corpus_digest": self.corpus_digest,
            "mains": [node_json(m) for m in self.mains],
            "unmodelable": list(self.unmodelable),
            "expansions": [
                {
                    "label": e.query.label,
                    "method": e.method,
                    "terms": [{"term": t, "weight": w} for t, w in e.terms],
                    "skipped": list(e.skipped),
                }
                for e in self.expansions
            ],
        }

    def save(self, corpus: Corpus, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json(corpus), indent=2, sort_keys=True) + "\n"
        )


def run_qdtm(corpus: Corpus, queries: list[Query], config: QdtmConfig) -> TopicHierarchy:
    config.validate()
    if not queries:
        raise ConfigError("at least one query is required")
    labels = [q.label for q in queries]
    if len(set(labels)) != len(labels):
        raise ConfigError("query labels must be unique")

    expansions: list[ConceptTermSet] = []
    modelable: list[Query] = []
    unmodelable: list[dict] = []
    for q in queries:
        try:
            expansions.append(
                expand(corpus, q, config.method, config.expansion_size,
                       dim=min(config.embedding_dim, len(corpus.vocabulary)),
                       seed=config.seed)
            )
            modelable.append(q)
        except ExpansionError as exc:
            unmodelable.append({"label": q.label, "reason": str(exc)})

    if not modelable:
        return TopicHierarchy(
            mains=(),
            background=np.zeros((0, len(corpus.vocabulary))),
            unmodelable=tuple(unmodelable),
            expansions=(),
            config=config,
            corpus_digest=corpus.digest,
        )

    phi, theta, background = _phase_one(corpus, expansions, config)
    tau = config.relevance_threshold
    mains: list[HierarchyNode] = []
    for qi, query in enumerate(modelable):
        main_docs = np.nonzero(theta[:, qi] >= tau)[0]
        if main_docs.size == 0:
            unmodelable.append(
                {
                    "label": query.label,
                    "reason": f"no documents reached relevance {tau} "
                    "for the seeded topic",
                }
            )
            continue
        children = _phase_two(corpus, main_docs, config, qi)
        mains.append(
            HierarchyNode(
                node_id=f"main:{query.label}",
                label=query.label,
                term_dist=phi[qi],
                doc_ids=tuple(int(d) for d in main_docs),
                children=children,
            )
        )
    return TopicHierarchy(
        mains=tuple(mains),
        background=background,
        unmodelable=tuple(unmodelable),
        expansions=tuple(expansions),
        config=config,
        corpus_digest=corpus.digest,
    )


def _phase_one(corpus: Corpus, expansions: list[ConceptTermSet], config: QdtmConfig):
    V = len(corpus.vocabulary)
    Q = len(expansions)
    K = Q + config.background_topics
    alpha = 50.0 / K if config.alpha is None else config.alpha

    beta_kw = np.full((K, V), config.beta, dtype=np.float64)
    owner = np.full(V, -1, dtype=np.int64)
    owner_weight = np.zeros(V, dtype=np.float64)
    for qi, exp in enumerate(expansions):
        ids = []
        weights = []
        vocab = corpus.vocabulary
        for term, w in exp.terms:
            tid = vocab.id_for(term)
            ids.append(tid)
            weights.append(max(w, 0.0))
        weights = np.asarray(weights, dtype=np.float64)
        if weights.sum() <= 0:
            weights = np.ones(len(ids))
        weights = weights / weights.sum()
        for tid, w in zip(ids, weights):
            beta_kw[qi, tid] += config.seed_boost * w
            if w > owner_weight[tid]:
                owner_weight[tid] = w
                owner[tid] = qi

    rng = np.random.Generator(
        np.random.PCG64(mix_seed(config.seed, _STREAM_QDTM, 2))
    )
    init_z = np.where(
        owner[corpus.token_words] >= 0,
        owner[corpus.token_words],
        Q + rng.integers(0, config.background_topics, size=corpus.n_tokens),
    ).astype(np.int32)

    iterations = config.iterations
    burn_in = max(int(iterations * 0.8), 1)
    sample_lag = max((iterations - burn_in) // 5, 1)
    n_samples = max((iterations - 1 - burn_in) // sample_lag + 1, 1)
    phi, theta, _, _, _, _ = run_lda_seeded(
        corpus.token_words,
        corpus.token_docs,
        corpus.doc_lengths.astype(np.int64),
        K,
        V,
        alpha,
        beta_kw,
        init_z,
        iterations,
        burn_in,
        sample_lag,
        n_samples,
        np.uint64(mix_seed(config.seed, _STREAM_QDTM, 0)),
        np.uint64(mix_seed(config.seed, _STREAM_QDTM, 0, 1)),
    )
    return phi[:Q], theta[:, :Q], phi[Q:]


def _phase_two(
    corpus: Corpus, main_docs: np.ndarray, config: QdtmConfig, query_index: int
) -> tuple[HierarchyNode, ...]:
    V = len(corpus.vocabulary)
    docs = [corpus.documents[int(d)] for d in main_docs]
    words = np.concatenate([d.tokens for d in docs]).astype(np.int32)
    local_ids = np.repeat(np.arange(len(docs), dtype=np.int32),
                          [len(d) for d in docs])
    n_topics, _, n_dk, n_kw = run_hdp(
        words,
        local_ids,
        len(docs),
        V,
        config.gamma,
        config.alpha0,
        config.beta,
        config.t_max,
        config.iterations,
        np.uint64(mix_seed(config.seed, _STREAM_QDTM, 1, query_index)),
        np.uint64(mix_seed(config.seed, _STREAM_QDTM, 1, query_index, 1)),
    )

    # dominant subtopic per document; ties to the lower topic id
    dominant = np.argmax(n_dk, axis=1)
    merged = _merge_small(dominant, n_topics, config.min_subtopic_docs)

    children = []
    for t in sorted(set(merged.tolist())):
        members = np.nonzero(merged == t)[0]
        dist = _merged_distribution(n_kw, merged, dominant, t, config.beta, V)
        children.append(
            HierarchyNode(
                node_id=f"sub:{query_index}:{t}",
                label=f"subtopic {len(children) + 1}",
                term_dist=dist,
                doc_ids=tuple(int(main_docs[m]) for m in members),
            )
        )
    return tuple(children)


def _merge_small(dominant: np.ndarray, n_topics: int, min_docs: int) -> np.ndarray:
    """Reassign documents of undersized subtopics to the largest sibling."""
    merged = dominant.copy()
    while True:
        sizes = np.bincount(merged, minlength=n_topics)
        live = np.nonzero(sizes > 0)[0]
        if live.size <= 1:
            break
        small = [t for t in live if sizes[t] < min_docs]
        if not small:
            break
        victim = min(small, key=lambda t: (sizes[t], t))
        target = max((t for t in live if t != victim),
                     key=lambda t: (sizes[t], -t))
        merged[merged == victim] = target
    return merged


def _merged_distribution(n_kw, merged, dominant, topic, beta, V):
    """Word distribution of a (possibly merged) subtopic: counts of every
    original topic whose documents now live under `topic`."""
    sources = {topic} | {
        int(orig)
        for orig, now in zip(dominant.tolist(), merged.tolist())
        if now == topic
    }
    counts = np.zeros(V, dtype=np.float64)
    for s in sources:
        counts += n_kw[s]
    dist = counts + beta
    return dist / dist.sum()


def coherence_of_hierarchy(
    hierarchy: TopicHierarchy, corpus: Corpus, top_n: int = 10, window: int = 110
) -> TopicHierarchy:
    """Score every node with sliding-window coherence over its top terms
    (corpus-present terms only); returns a hierarchy with c_v filled in."""
    nodes = hierarchy.nodes()
    word_lists = [node_top_words(n, corpus, top_n) for n in nodes]
    scores, _ = cv_score_wordsets(corpus, word_lists, window)
    by_id = {n.node_id: s for n, s in zip(nodes, scores)}

    def rebuild(node: HierarchyNode) -> HierarchyNode:
        return HierarchyNode(
            node_id=node.node_id,
            label=node.label,
            term_dist=node.term_dist,
            doc_ids=node.doc_ids,
            children=tuple(rebuild(c) for c in node.children),
            c_v=by_id[node.node_id],
        )

    return TopicHierarchy(
        mains=tuple(rebuild(m) for m in hierarchy.mains),
        background=hierarchy.background,
        unmodelable=hierarchy.unmodelable,
        expansions=hierarchy.expansions,
        config=hierarchy.config,
        corpus_digest=hierarchy.corpus_digest,
    )


def node_top_words(node: HierarchyNode, corpus: Corpus, top_n: int = 10) -> list[int]:
    """Top-n corpus-present term ids of a node's distribution."""
    df = corpus.vocabulary.doc_freq
    order = np.argsort(-node.term_dist, kind="stable")
    picked = []
    for i in order:
        if df[i] > 0:
            picked.append(int(i))
            if len(picked) == top_n:
                break
    return picked
