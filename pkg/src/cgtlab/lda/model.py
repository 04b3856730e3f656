"""LDA training, ranked views, and the model artifact."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ..corpus import Corpus
from ..errors import ConfigError, InternalError
from ..seeds import digest_arrays, mix_seed
from .gibbs import run_lda

_STREAM_LDA = 0x4C444121  # stream tag for chain seed derivation


@dataclass(frozen=True)
class LdaConfig:
    K: int
    alpha: float | None = None  # defaults to 50/K at train time
    beta: float = 0.01
    iterations: int = 1000
    burn_in: int = 800
    sample_lag: int = 20
    n_samples: int = 10
    seed: int = 0

    def resolved_alpha(self) -> float:
        return 50.0 / self.K if self.alpha is None else self.alpha

    def validate(self) -> None:
        if self.K < 1:
            raise ConfigError("K must be >= 1", field="K")
        if self.resolved_alpha() <= 0:
            raise ConfigError("alpha must be positive", field="alpha")
        if self.beta <= 0:
            raise ConfigError("beta must be positive", field="beta")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1", field="iterations")
        if self.sample_lag < 1 or self.n_samples < 1 or self.burn_in < 0:
            raise ConfigError("invalid sampling schedule", field="burn_in")
        if self.burn_in + self.sample_lag * (self.n_samples - 1) >= self.iterations:
            raise ConfigError(
                "burn_in + sample_lag*(n_samples-1) must be < iterations",
                field="iterations",
            )

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "alpha": self.alpha,
            "beta": self.beta,
            "iterations": self.iterations,
            "burn_in": self.burn_in,
            "sample_lag": self.sample_lag,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "LdaConfig":
        return cls(**{k: obj[k] for k in cls.__dataclass_fields__ if k in obj})


class RankedTerm(NamedTuple):
    term_id: int
    weight: float


class RankedDocument(NamedTuple):
    doc_id: int
    weight: float


@dataclass(frozen=True)
class TopicModel:
    phi: np.ndarray  # K x V, row-stochastic
    theta: np.ndarray  # D x K, row-stochastic
    assignments: np.ndarray  # per-token topic ids
    n_dk: np.ndarray
    n_kw: np.ndarray
    n_k: np.ndarray
    config: LdaConfig
    corpus_digest: str
    loglik: np.ndarray

    @property
    def K(self) -> int:
        return self.phi.shape[0]

    @property
    def V(self) -> int:
        return self.phi.shape[1]

    @property
    def n_docs(self) -> int:
        return self.theta.shape[0]

    @property
    def doc_lengths(self) -> np.ndarray:
        return self.n_dk.sum(axis=1)

    @property
    def digest(self) -> str:
        return digest_arrays(self.phi, self.theta)


def train_lda(corpus: Corpus, config: LdaConfig) -> TopicModel:
    """Collapsed Gibbs training, deterministic given (corpus, config)."""
    config.validate()
    if corpus.n_docs == 0:
        raise ConfigError("corpus is empty")
    if config.K > corpus.n_tokens:
        raise ConfigError(
            f"K={config.K} exceeds total token count {corpus.n_tokens}", field="K"
        )
    seed = mix_seed(config.seed, _STREAM_LDA)
    seq = mix_seed(config.seed, _STREAM_LDA, 1)
    phi, theta, z, n_dk, n_kw, n_k, loglik = run_lda(
        corpus.token_words,
        corpus.token_docs,
        corpus.doc_lengths.astype(np.int64),
        config.K,
        len(corpus.vocabulary),
        config.resolved_alpha(),
        config.beta,
        config.iterations,
        config.burn_in,
        config.sample_lag,
        config.n_samples,
        np.uint64(seed),
        np.uint64(seq),
    )
    if np.isnan(phi).any() or np.isnan(theta).any():
        raise InternalError("NaN in posterior estimates")
    for arr in (phi, theta, z, n_dk, n_kw, n_k, loglik):
        arr.setflags(write=False)
    return TopicModel(
        phi=phi,
        theta=theta,
        assignments=z,
        n_dk=n_dk,
        n_kw=n_kw,
        n_k=n_k,
        config=config,
        corpus_digest=corpus.digest,
        loglik=loglik,
    )


def top_terms(model: TopicModel, topic: int, n: int) -> list[RankedTerm]:
    """Top-n terms of a topic by weight, ties broken by ascending id."""
    if not 0 <= topic < model.K:
        raise IndexError(f"topic {topic} out of range [0, {model.K})")
    if n < 1:
        raise ValueError("n must be >= 1")
    row = model.phi[topic]
    order = np.argsort(-row, kind="stable")[: min(n, model.V)]
    return [RankedTerm(int(i), float(row[i])) for i in order]


def top_documents(model: TopicModel, topic: int, n: int) -> list[RankedDocument]:
    """Documents ranked by topic weight; ties prefer longer documents,
    then ascending doc id."""
    if not 0 <= topic < model.K:
        raise IndexError(f"topic {topic} out of range [0, {model.K})")
    if n < 1:
        raise ValueError("n must be >= 1")
    col = model.theta[:, topic]
    lengths = model.doc_lengths
    ids = np.arange(model.n_docs)
    order = np.lexsort((ids, -lengths, -col))[: min(n, model.n_docs)]
    return [RankedDocument(int(d), float(col[d])) for d in order]


def permute_topics(model: TopicModel, perm: list[int]) -> TopicModel:
    """Relabel topics; outputs must permute identically (tested)."""
    p = np.asarray(perm)
    inverse = np.empty_like(p)
    inverse[p] = np.arange(len(p))
    return replace(
        model,
        phi=model.phi[p],
        theta=model.theta[:, p],
        assignments=inverse[model.assignments],
        n_dk=model.n_dk[:, p],
        n_kw=model.n_kw[p],
        n_k=model.n_k[p],
    )


def save_model(model: TopicModel, path: str | Path) -> None:
    """Model artifact: little-endian float64 matrices + model.json."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    model.phi.astype("<f8").tofile(path / "phi.bin")
    model.theta.astype("<f8").tofile(path / "theta.bin")
    model.assignments.astype("<i4").tofile(path / "assignments.bin")
    model.n_dk.astype("<i4").tofile(path / "n_dk.bin")
    model.n_kw.astype("<i4").tofile(path / "n_kw.bin")
    meta = {
        "config": model.config.to_dict(),
        "corpus_digest": model.corpus_digest,
        "K": model.K,
        "V": model.V,
        "n_docs": model.n_docs,
        "n_tokens": int(model.assignments.shape[0]),
        "loglik": [float(x) for x in model.loglik],
        "digest": model.digest,
    }
    with open(path / "model.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path: str | Path) -> TopicModel:
    path = Path(path)
    with open(path / "model.json", encoding="utf-8") as fh:
        meta = json.load(fh)
    K, V, D = meta["K"], meta["V"], meta["n_docs"]
    phi = np.fromfile(path / "phi.bin", dtype="<f8").reshape(K, V)
    theta = np.fromfile(path / "theta.bin", dtype="<f8").reshape(D, K)
    z = np.fromfile(path / "assignments.bin", dtype="<i4")
    n_dk = np.fromfile(path / "n_dk.bin", dtype="<i4").reshape(D, K)
    n_kw = np.fromfile(path / "n_kw.bin", dtype="<i4").reshape(K, V)
    n_k = n_kw.sum(axis=1).astype(np.int64)
    for arr in (phi, theta, z, n_dk, n_kw, n_k):
        arr.setflags(write=False)
    return TopicModel(
        phi=phi,
        theta=theta,
        assignments=z,
        n_dk=n_dk,
        n_kw=n_kw,
        n_k=n_k,
        config=LdaConfig.from_dict(meta["config"]),
        corpus_digest=meta["corpus_digest"],
        loglik=np.array(meta["loglik"]),
    )


def export_topics_csv(model: TopicModel, corpus: Corpus, path: str | Path,
                      n_terms: int = 20, n_docs: int = 5) -> None:
    """Top terms and documents per topic as a flat CSV."""
    rows = ["topic,rank,kind,item,weight"]
    for k in range(model.K):
        for rank, (tid, w) in enumerate(top_terms(model, k, n_terms), 1):
            rows.append(f"{k},{rank},term,{corpus.vocabulary.terms[tid]},{w!r}")
        for rank, (did, w) in enumerate(top_documents(model, k, n_docs), 1):
            rows.append(f"{k},{rank},document,{corpus.documents[did].source_id},{w!r}")
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")
