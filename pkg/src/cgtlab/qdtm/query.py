"""Query terms feeding the seeded topic models."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class Query:
    label: str
    terms: frozenset[str]

    def in_vocabulary(self, vocabulary) -> list[str]:
        """Terms present in the corpus vocabulary, sorted for determinism."""
        return sorted(t for t in self.terms if vocabulary.id_for(t) is not None)

    def out_of_vocabulary(self, vocabulary) -> list[str]:
        return sorted(t for t in self.terms if vocabulary.id_for(t) is None)


def save_queries(queries: list[Query], path: str | Path) -> None:
    payload = {
        "queries": [
            {"label": q.label, "terms": sorted(q.terms)} for q in queries
        ]
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_queries(path: str | Path) -> list[Query]:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    return [
        Query(label=q["label"], terms=frozenset(q["terms"])) for q in obj["queries"]
    ]
