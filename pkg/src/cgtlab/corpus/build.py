"""Tokenized corpus construction and the on-disk corpus artifact."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from ..errors import BuildError
from ..seeds import digest_arrays, digest_json
from .posts import RawPost
from .preprocess import PreprocessConfig, preprocess

MIN_DOC_TOKENS = 2


@dataclass(frozen=True)
class Document:
    doc_id: int
    source_id: str
    tokens: np.ndarray  # int32 vocabulary ids, input order preserved

    def __len__(self) -> int:
        return int(self.tokens.shape[0])


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]  # dense id -> term
    term_to_id: dict[str, int]
    term_freq: np.ndarray
    doc_freq: np.ndarray

    def __len__(self) -> int:
        return len(self.terms)

    def id_for(self, term: str) -> int | None:
        return self.term_to_id.get(term)


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    vocabulary: Vocabulary
    provenance: dict = field(default_factory=dict)

    @property
    def n_docs(self) -> int:
        return len(self.documents)

    @cached_property
    def doc_lengths(self) -> np.ndarray:
        arr = np.array([len(d) for d in self.documents], dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def n_tokens(self) -> int:
        return int(self.doc_lengths.sum())

    @cached_property
    def token_words(self) -> np.ndarray:
        """All token ids concatenated in document order (sampler layout)."""
        arr = (
            np.concatenate([d.tokens for d in self.documents])
            if self.documents
            else np.empty(0, np.int32)
        )
        arr = arr.astype(np.int32)
        arr.setflags(write=False)
        return arr

    @cached_property
    def token_docs(self) -> np.ndarray:
        arr = np.repeat(np.arange(self.n_docs, dtype=np.int32), self.doc_lengths)
        arr.setflags(write=False)
        return arr

    @cached_property
    def digest(self) -> str:
        terms_digest = digest_json(list(self.vocabulary.terms))
        return digest_arrays(
            self.token_words,
            self.doc_lengths,
            np.frombuffer(terms_digest.encode(), dtype=np.uint8),
        )


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def build_corpus(
    posts: list[RawPost],
    config: PreprocessConfig,
    *,
    manifest: dict | None = None,
) -> Corpus:
    """Preprocess posts, drop short documents, prune the vocabulary.

    Pruning runs to a fixed point: dropping rare/ubiquitous terms can
    empty documents, and dropping documents can push terms back under
    min_df, so both filters repeat until stable. Dense term ids are
    assigned by descending corpus frequency, ties broken alphabetically.
    """
    if not posts:
        raise BuildError("no posts to build from")
    docs = [(p.id, preprocess(p.text, config)) for p in posts]
    docs = [(sid, toks) for sid, toks in docs if len(toks) >= MIN_DOC_TOKENS]

    while True:
        if not docs:
            raise BuildError(
                "all documents filtered out "
                f"(min_df={config.min_df}, max_df_ratio={config.max_df_ratio}, "
                f"min_token_len={config.min_token_len})"
            )
        df: dict[str, int] = {}
        for _, toks in docs:
            for term in set(toks):
                df[term] = df.get(term, 0) + 1
        n_docs = len(docs)
        keep = {
            t
            for t, c in df.items()
            if c >= config.min_df and c <= config.max_df_ratio * n_docs
        }
        if len(keep) == len(df):
            break
        docs = [(sid, [t for t in toks if t in keep]) for sid, toks in docs]
        docs = [(sid, toks) for sid, toks in docs if len(toks) >= MIN_DOC_TOKENS]

    tf: dict[str, int] = {}
    for _, toks in docs:
        for term in toks:
            tf[term] = tf.get(term, 0) + 1
    ordered = sorted(tf, key=lambda t: (-tf[t], t))
    term_to_id = {t: i for i, t in enumerate(ordered)}

    documents = tuple(
        Document(
            doc_id=i,
            source_id=sid,
            tokens=_freeze(np.array([term_to_id[t] for t in toks], dtype=np.int32)),
        )
        for i, (sid, toks) in enumerate(docs)
    )
    term_freq = _freeze(np.array([tf[t] for t in ordered], dtype=np.int64))
    doc_freq = _freeze(np.array([df[t] for t in ordered], dtype=np.int64))
    vocabulary = Vocabulary(
        terms=tuple(ordered),
        term_to_id=term_to_id,
        term_freq=term_freq,
        doc_freq=doc_freq,
    )
    prov = {
        "config_digest": config.digest(),
        "min_df": config.min_df,
        "max_df_ratio": config.max_df_ratio,
        "n_posts_in": len(posts),
    }
    if manifest:
        prov.update(manifest)
    return Corpus(documents=documents, vocabulary=vocabulary, provenance=prov)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Corpus artifact: vocab.tsv + docs.jsonl + manifest.json."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    vocab = corpus.vocabulary
    with open(path / "vocab.tsv", "w", encoding="utf-8") as fh:
        for i, term in enumerate(vocab.terms):
            fh.write(f"{i}\t{term}\t{int(vocab.term_freq[i])}\t{int(vocab.doc_freq[i])}\n")
    with open(path / "docs.jsonl", "w", encoding="utf-8") as fh:
        for d in corpus.documents:
            fh.write(
                json.dumps(
                    {"doc_id": d.doc_id, "source_id": d.source_id, "tokens": d.tokens.tolist()}
                )
                + "\n"
            )
    manifest = {
        "provenance": corpus.provenance,
        "n_docs": corpus.n_docs,
        "vocab_size": len(vocab),
        "n_tokens": corpus.n_tokens,
        "digest": corpus.digest,
    }
    with open(path / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_corpus(path: str | Path) -> Corpus:
    path = Path(path)
    terms: list[str] = []
    tf: list[int] = []
    df: list[int] = []
    with open(path / "vocab.tsv", encoding="utf-8") as fh:
        for line in fh:
            _, term, f1, f2 = line.rstrip("\n").split("\t")
            terms.append(term)
            tf.append(int(f1))
            df.append(int(f2))
    vocabulary = Vocabulary(
        terms=tuple(terms),
        term_to_id={t: i for i, t in enumerate(terms)},
        term_freq=_freeze(np.array(tf, dtype=np.int64)),
        doc_freq=_freeze(np.array(df, dtype=np.int64)),
    )
    documents = []
    with open(path / "docs.jsonl", encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            documents.append(
                Document(
                    doc_id=obj["doc_id"],
                    source_id=obj["source_id"],
                    tokens=_freeze(np.array(obj["tokens"], dtype=np.int32)),
                )
            )
    with open(path / "manifest.json", encoding="utf-8") as fh:
        manifest = json.load(fh)
    return Corpus(
        documents=tuple(documents),
        vocabulary=vocabulary,
        provenance=manifest.get("provenance", {}),
    )
