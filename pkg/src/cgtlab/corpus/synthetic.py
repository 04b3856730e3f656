"""Synthetic ground-truth corpora for recovery tests.

Documents follow the standard topic-mixture generative process; the
planted topic-word and document-topic distributions are returned so
tests can score how well inference recovers them. With n_children >= 2
each topic is an even mixture of child distributions and every document
picks one child per topic, giving a two-level ground truth for subtopic
recovery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..seeds import mix_seed
from .build import Corpus, Document, Vocabulary, _freeze

_STREAM_SYNTH = 0x53594E54  # stream tag for seed derivation


@dataclass(frozen=True)
class SynthSpec:
    k_true: int
    vocab_size: int
    n_docs: int
    doc_len_mean: float
    alpha_true: float = 0.1
    beta_true: float = 0.05
    seed: int = 0
    n_children: int = 0  # >= 2 plants a two-level hierarchy
    child_beta: float = 0.02

    def __post_init__(self):
        if self.k_true < 1:
            raise ValueError("k_true must be >= 1")
        if self.vocab_size < self.k_true:
            raise ValueError("vocab_size must be >= k_true")
        if self.n_docs < 1 or self.doc_len_mean <= 0:
            raise ValueError("need n_docs >= 1 and doc_len_mean > 0")
        if self.alpha_true <= 0 or self.beta_true <= 0:
            raise ValueError("concentrations must be positive")


@dataclass(frozen=True)
class SynthResult:
    corpus: Corpus
    phi: np.ndarray  # K_true x V planted topic-word rows
    theta: np.ndarray  # D x K_true planted document-topic rows
    child_phi: np.ndarray | None = None  # K_true x C x V
    doc_child: np.ndarray | None = None  # D x K_true child picks


def generate_synthetic(spec: SynthSpec) -> SynthResult:
    rng = np.random.Generator(np.random.PCG64(mix_seed(spec.seed, _STREAM_SYNTH)))
    K, V, D = spec.k_true, spec.vocab_size, spec.n_docs

    hierarchical = spec.n_children >= 2
    if hierarchical:
        # parents own disjoint vocabulary blocks so the two-level ground
        # truth is identifiable; every child of a parent blends a shared
        # core (the parent's identity words) with its own specialization
        block = V // K
        child_phi = np.full((K, spec.n_children, V), 1e-12)
        for k in range(K):
            lo = k * block
            hi = V if k == K - 1 else (k + 1) * block
            core = rng.dirichlet(np.full(hi - lo, 0.5))
            specific = rng.dirichlet(
                np.full(hi - lo, spec.child_beta), size=spec.n_children
            )
            child_phi[k, :, lo:hi] = 0.5 * core[None, :] + 0.5 * specific
        child_phi = child_phi / child_phi.sum(axis=2, keepdims=True)
        phi = child_phi.mean(axis=1)
        phi = phi / phi.sum(axis=1, keepdims=True)
    else:
        child_phi = None
        phi = rng.dirichlet(np.full(V, spec.beta_true), size=K)
    theta = rng.dirichlet(np.full(K, spec.alpha_true), size=D)
    lengths = np.maximum(rng.poisson(spec.doc_len_mean, size=D), 2)
    doc_child = rng.integers(0, spec.n_children, size=(D, K)) if hierarchical else None

    documents = []
    for d in range(D):
        z = rng.choice(K, size=lengths[d], p=theta[d])
        words = np.empty(lengths[d], dtype=np.int32)
        for k in np.unique(z):
            at = z == k
            row = child_phi[k, doc_child[d, k]] if hierarchical else phi[k]
            words[at] = rng.choice(V, size=int(at.sum()), p=row)
        documents.append(
            Document(doc_id=d, source_id=f"synth-{d}", tokens=_freeze(words))
        )

    terms = tuple(f"w{i:05d}" for i in range(V))
    tf = np.zeros(V, dtype=np.int64)
    df = np.zeros(V, dtype=np.int64)
    for doc in documents:
        np.add.at(tf, doc.tokens, 1)
        df[np.unique(doc.tokens)] += 1
    vocabulary = Vocabulary(
        terms=terms,
        term_to_id={t: i for i, t in enumerate(terms)},
        term_freq=_freeze(tf),
        doc_freq=_freeze(df),
    )
    corpus = Corpus(
        documents=tuple(documents),
        vocabulary=vocabulary,
        provenance={
            "synthetic": {
                "k_true": K,
                "vocab_size": V,
                "n_docs": D,
                "doc_len_mean": spec.doc_len_mean,
                "alpha_true": spec.alpha_true,
                "beta_true": spec.beta_true,
                "seed": spec.seed,
                "n_children": spec.n_children,
                "child_beta": spec.child_beta,
            }
        },
    )
    return SynthResult(
        corpus=corpus, phi=phi, theta=theta, child_phi=child_phi, doc_child=doc_child
    )
