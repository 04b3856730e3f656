"""Concurrent validation: human topic labels versus hand-coded themes.

A theme counts as detected by a run when any labeled topic in that run
references it; topics labeled with no theme reference are novel unless
flagged "Random". The final topic roster carried into query modeling is
every comparable theme (detected or to-be-proposed) plus the novel
topics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..errors import ConcurrenceError

RANDOM_LABEL = "Random"


@dataclass(frozen=True)
class Theme:
    theme_id: int
    label: str
    description: str = ""
    comparable: bool = True


@dataclass(frozen=True)
class TopicLabeling:
    run_id: str
    topic_id: int
    labels: tuple[str, ...]
    theme_refs: tuple[int, ...]
    annotator: str = ""
    timestamp: str = ""

    @property
    def display_label(self) -> str:
        return " / ".join(self.labels)

    @property
    def is_random(self) -> bool:
        return not self.theme_refs and RANDOM_LABEL in self.labels


@dataclass(frozen=True)
class FinalTopic:
    """One row of the final roster: a theme or a novel topic label."""

    key: str  # "theme:<id>" or "novel:<label>"
    label: str
    theme_id: int | None
    present_in: tuple[str, ...]  # run ids that modeled it (empty = proposed)


@dataclass(frozen=True)
class ConcurrenceReport:
    run_order: tuple[str, ...]
    comparable_themes: tuple[int, ...]
    per_run: dict[str, dict]  # run_id -> {"detected": [...], "novel": [...]}
    detected_themes: tuple[int, ...]  # union over runs
    missing_themes: tuple[int, ...]
    novel_topics: tuple[str, ...]
    final_topics: tuple[FinalTopic, ...]
    final_topic_count: int
    theme_labels: dict[int, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "run_order": list(self.run_order),
            "comparable_themes": list(self.comparable_themes),
            "per_run": self.per_run,
            "detected_themes": list(self.detected_themes),
            "missing_themes": list(self.missing_themes),
            "novel_topics": list(self.novel_topics),
            "final_topics": [
                {
                    "key": t.key,
                    "label": t.label,
                    "theme_id": t.theme_id,
                    "present_in": list(t.present_in),
                }
                for t in self.final_topics
            ],
            "final_topic_count": self.final_topic_count,
            "theme_labels": {str(k): v for k, v in self.theme_labels.items()},
        }

    def to_markdown(self) -> str:
        lines = [
            "| Final topic | Status | Modeled by |",
            "| --- | --- | --- |",
        ]
        for t in self.final_topics:
            if t.theme_id is None:
                status = "novel"
            elif t.present_in:
                status = "detected"
            else:
                status = "missing (terms to be proposed)"
            lines.append(f"| {t.label} | {status} | {', '.join(t.present_in) or '-'} |")
        lines.append("")
        lines.append(
            f"Detected {len(self.detected_themes)} of {len(self.comparable_themes)} "
            f"comparable themes; {len(self.novel_topics)} novel; "
            f"final topic count {self.final_topic_count}."
        )
        return "\n".join(lines)


def compare(
    themes: list[Theme], labelings: dict[str, list[TopicLabeling]]
) -> ConcurrenceReport:
    """Concurrence of one or more labeled runs against the theme list.

    Output is independent of labeling order within a run; run order only
    affects final-roster ordering for single-run topics.
    """
    if not labelings:
        raise ConcurrenceError("at least one run of labelings is required")
    theme_ids = {t.theme_id for t in themes}
    theme_labels = {t.theme_id: t.label for t in themes}
    comparable = sorted(t.theme_id for t in themes if t.comparable)

    offenders = [
        (lab.run_id, lab.topic_id, ref)
        for labs in labelings.values()
        for lab in labs
        for ref in lab.theme_refs
        if ref not in theme_ids
    ]
    if offenders:
        raise ConcurrenceError(f"labelings reference unknown themes: {offenders}")

    per_run: dict[str, dict] = {}
    union_detected: set[int] = set()
    novel_order: list[str] = []  # first-seen order across runs
    novel_runs: dict[str, list[str]] = {}
    theme_runs: dict[int, list[str]] = {t: [] for t in comparable}
    for run_id, labs in labelings.items():
        detected = sorted(
            {ref for lab in labs for ref in lab.theme_refs if ref in set(comparable)}
        )
        run_novel = []
        for lab in labs:
            if lab.theme_refs or lab.is_random:
                continue
            name = lab.display_label
            if name not in run_novel:
                run_novel.append(name)
            if name not in novel_order:
                novel_order.append(name)
            novel_runs.setdefault(name, [])
            if run_id not in novel_runs[name]:
                novel_runs[name].append(run_id)
        per_run[run_id] = {"detected": detected, "novel": sorted(run_novel)}
        union_detected.update(detected)
        for t in detected:
            if run_id not in theme_runs[t]:
                theme_runs[t].append(run_id)

    missing = sorted(set(comparable) - union_detected)
    novel = sorted(novel_order)

    final = _ordered_roster(comparable, theme_labels, theme_runs, novel_runs, labelings)
    return ConcurrenceReport(
        run_order=tuple(labelings.keys()),
        comparable_themes=tuple(comparable),
        per_run=per_run,
        detected_themes=tuple(sorted(union_detected)),
        missing_themes=tuple(missing),
        novel_topics=tuple(novel),
        final_topics=tuple(final),
        final_topic_count=len(final),
        theme_labels=theme_labels,
    )


def _ordered_roster(comparable, theme_labels, theme_runs, novel_runs, labelings):
    """Roster order: topics modeled by every run first (themes by id, then
    novel alphabetically), then single-run topics grouped by run order,
    then missing themes awaiting proposals."""
    run_order = list(labelings.keys())
    n_runs = len(run_order)
    final: list[FinalTopic] = []

    def theme_topic(tid):
        return FinalTopic(
            key=f"theme:{tid}",
            label=theme_labels[tid],
            theme_id=tid,
            present_in=tuple(theme_runs[tid]),
        )

    def novel_topic(name):
        return FinalTopic(
            key=f"novel:{name}",
            label=name,
            theme_id=None,
            present_in=tuple(novel_runs[name]),
        )

    shared = [t for t in comparable if len(theme_runs[t]) == n_runs and n_runs > 0]
    final.extend(theme_topic(t) for t in shared)
    final.extend(
        novel_topic(n) for n in sorted(novel_runs) if len(novel_runs[n]) == n_runs
    )
    for run_id in run_order:
        for t in comparable:
            if theme_runs[t] == [run_id]:
                final.append(theme_topic(t))
        for n in sorted(novel_runs):
            if novel_runs[n] == [run_id]:
                final.append(novel_topic(n))
    # anything modeled by some-but-not-all runs (3+ run setups)
    seen = {f.key for f in final}
    for t in comparable:
        if theme_runs[t] and f"theme:{t}" not in seen:
            final.append(theme_topic(t))
    for n in sorted(novel_runs):
        if f"novel:{n}" not in seen and novel_runs[n]:
            final.append(novel_topic(n))
    # missing themes close the roster
    final.extend(theme_topic(t) for t in comparable if not theme_runs[t])
    return final


# ----------------------------------------------------------- fixture io


def _fixture_text(name: str) -> str:
    return resources.files("cgtlab.validation").joinpath(f"fixtures/{name}").read_text("utf-8")


def bundled_themes() -> list[Theme]:
    obj = json.loads(_fixture_text("themes.json"))
    return [Theme(**t) for t in obj["themes"]]


def load_themes(path: str | Path) -> list[Theme]:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    return [Theme(**t) for t in obj["themes"]]


def _labelings_from_obj(obj: dict) -> tuple[str, list[TopicLabeling]]:
    run_id = obj["run_id"]
    labs = [
        TopicLabeling(
            run_id=run_id,
            topic_id=l["topic_id"],
            labels=tuple(l["labels"]),
            theme_refs=tuple(l["theme_refs"]),
            annotator=l.get("annotator", obj.get("annotator", "")),
            timestamp=l.get("timestamp", ""),
        )
        for l in obj["labelings"]
    ]
    return run_id, labs


def bundled_labelings(name: str) -> tuple[str, list[TopicLabeling]]:
    """name: "labelings_13" or "labelings_17"."""
    return _labelings_from_obj(json.loads(_fixture_text(f"{name}.json")))


def load_labelings(path: str | Path) -> tuple[str, list[TopicLabeling]]:
    return _labelings_from_obj(json.loads(Path(path).read_text(encoding="utf-8")))
