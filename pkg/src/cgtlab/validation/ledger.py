"""Per-topic query-term ledger: set algebra over two models' term lists.

For topics both models found, the surviving terms split into common /
unique-to-A / unique-to-B. Topics one model found fill a single column.
Themes neither model found require human-proposed terms; model-backed
rows never accept added terms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..corpus import Corpus
from ..errors import LedgerError
from ..lda import TopicModel, top_terms
from ..qdtm.query import Query
from .concurrence import ConcurrenceReport, TopicLabeling


@dataclass(frozen=True)
class LedgerRow:
    key: str
    label: str
    theme_id: int | None
    common: tuple[str, ...]
    unique_a: tuple[str, ...]
    unique_b: tuple[str, ...]
    proposed: tuple[str, ...]

    def all_terms(self) -> list[str]:
        seen = []
        for col in (self.common, self.unique_a, self.unique_b, self.proposed):
            for t in col:
                if t not in seen:
                    seen.append(t)
        return seen


@dataclass(frozen=True)
class TermLedger:
    run_a: str
    run_b: str
    rows: tuple[LedgerRow, ...]

    def to_json(self) -> dict:
        return {
            "run_a": self.run_a,
            "run_b": self.run_b,
            "rows": [
                {
                    "key": r.key,
                    "label": r.label,
                    "theme_id": r.theme_id,
                    "common": list(r.common),
                    "unique_a": list(r.unique_a),
                    "unique_b": list(r.unique_b),
                    "proposed": list(r.proposed),
                }
                for r in self.rows
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TermLedger":
        return cls(
            run_a=obj["run_a"],
            run_b=obj["run_b"],
            rows=tuple(
                LedgerRow(
                    key=r["key"],
                    label=r["label"],
                    theme_id=r.get("theme_id"),
                    common=tuple(r["common"]),
                    unique_a=tuple(r["unique_a"]),
                    unique_b=tuple(r["unique_b"]),
                    proposed=tuple(r["proposed"]),
                )
                for r in obj["rows"]
            ),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "TermLedger":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def _ordered(terms: set[str], reference: list[str]) -> tuple[str, ...]:
    """Stable column order: first appearance in the contributing list."""
    return tuple(t for t in reference if t in terms)


def topic_term_lists(
    model: TopicModel,
    corpus: Corpus,
    labelings: list[TopicLabeling],
    top_n: int = 20,
    exclusions: dict[int, set[str]] | None = None,
) -> dict[str, list[str]]:
    """Per final-topic term lists from a trained model.

    Terms are the post-exclusion top-n of each topic (zero-weight terms
    never qualify); multi-theme topics contribute to every referenced
    theme. Keys follow the roster convention: "theme:<id>" / "novel:<label>".
    """
    exclusions = exclusions or {}
    out: dict[str, list[str]] = {}
    for lab in labelings:
        if lab.is_random:
            continue
        dropped = exclusions.get(lab.topic_id, set())
        terms = []
        for rt in top_terms(model, lab.topic_id, top_n):
            if rt.weight <= 0:
                break
            term = corpus.vocabulary.terms[rt.term_id]
            if term not in dropped:
                terms.append(term)
        keys = [f"theme:{ref}" for ref in lab.theme_refs] or [
            f"novel:{lab.display_label}"
        ]
        for key in keys:
            bucket = out.setdefault(key, [])
            bucket.extend(t for t in terms if t not in bucket)
    return out


def build_term_ledger(
    report: ConcurrenceReport,
    run_terms: dict[str, dict[str, list[str]]],
    proposals: dict[int, list[str]] | None = None,
) -> TermLedger:
    """Assemble the ledger from per-run, per-final-topic term lists.

    run_terms maps run_id -> {roster key -> surviving terms}; proposals
    map theme_id -> human terms for themes absent from both models.
    """
    if len(run_terms) != 2:
        raise LedgerError(f"exactly two runs required, got {len(run_terms)}")
    proposals = proposals or {}
    (run_a, terms_a), (run_b, terms_b) = run_terms.items()

    rows = []
    for topic in report.final_topics:
        a_list = terms_a.get(topic.key, [])
        b_list = terms_b.get(topic.key, [])
        a_set, b_set = set(a_list), set(b_list)
        proposed = proposals.get(topic.theme_id) if topic.theme_id is not None else None
        if a_set or b_set:
            if proposed:
                raise LedgerError(
                    f"{topic.label!r} is model-derived; proposed terms would add "
                    "terms the models did not produce"
                )
            rows.append(
                LedgerRow(
                    key=topic.key,
                    label=topic.label,
                    theme_id=topic.theme_id,
                    common=_ordered(a_set & b_set, a_list),
                    unique_a=_ordered(a_set - b_set, a_list),
                    unique_b=_ordered(b_set - a_set, b_list),
                    proposed=(),
                )
            )
        else:
            if not proposed:
                raise LedgerError(
                    f"theme {topic.label!r} is absent from both models and has "
                    "no proposed terms"
                )
            rows.append(
                LedgerRow(
                    key=topic.key,
                    label=topic.label,
                    theme_id=topic.theme_id,
                    common=(),
                    unique_a=(),
                    unique_b=(),
                    proposed=tuple(proposed),
                )
            )
    return TermLedger(run_a=run_a, run_b=run_b, rows=tuple(rows))


def build_term_ledger_from_models(
    report: ConcurrenceReport,
    models: dict[str, tuple[TopicModel, Corpus]],
    labelings: dict[str, list[TopicLabeling]],
    top_n: int = 20,
    exclusions: dict[str, dict[int, set[str]]] | None = None,
    proposals: dict[int, list[str]] | None = None,
) -> TermLedger:
    """Ledger straight from two trained models plus their labelings."""
    exclusions = exclusions or {}
    run_terms = {
        run_id: topic_term_lists(
            model, corpus, labelings[run_id], top_n, exclusions.get(run_id)
        )
        for run_id, (model, corpus) in models.items()
    }
    return build_term_ledger(report, run_terms, proposals)


def ledger_to_queries(ledger: TermLedger) -> list[Query]:
    """One query per ledger row: the union of all columns, lowercased."""
    queries = []
    for row in ledger.rows:
        terms = frozenset(t.lower() for t in row.all_terms())
        if not terms:
            raise LedgerError(f"ledger row {row.label!r} has no terms")
        queries.append(Query(label=row.label, terms=terms))
    return queries


# ----------------------------------------------------------- fixture io


def _fixture(name: str) -> dict:
    text = resources.files("cgtlab.validation").joinpath(f"fixtures/{name}").read_text("utf-8")
    return json.loads(text)


def bundled_term_selections(name: str) -> tuple[str, dict[str, list[str]]]:
    """name: "term_selections_13" / "term_selections_17". Keys in the file
    are theme ids or novel labels; returned keys use roster convention."""
    obj = _fixture(f"{name}.json")
    selections = {}
    for key, terms in obj["selections"].items():
        roster_key = f"theme:{int(key)}" if key.isdigit() else f"novel:{key}"
        selections[roster_key] = list(terms)
    return obj["run_id"], selections


def bundled_proposals() -> dict[int, list[str]]:
    obj = _fixture("proposals.json")
    return {int(k): list(v) for k, v in obj["proposals"].items()}
