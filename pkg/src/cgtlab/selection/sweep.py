"""Parallel sweep over the number of topics and rank-sum selection."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..corpus import Corpus
from ..errors import ConfigError, SelectionError, SweepError
from ..lda import LdaConfig, train_lda
from ..seeds import mix_seed
from .metrics import arun_metric, cao_metric, cv_coherence, umass_coherence

# metric name -> True when larger is better
METRIC_DIRECTIONS = {"cao": False, "arun": False, "umass": True, "c_v": True}


@dataclass(frozen=True)
class SweepConfig:
    k_min: int
    k_max: int
    k_step: int = 1
    base: LdaConfig = field(default_factory=lambda: LdaConfig(K=1))  # K ignored
    coherence_top_n: int = 10
    window_size: int = 110
    jobs: int = 1

    def validate(self) -> None:
        if not (1 <= self.k_min <= self.k_max):
            raise ConfigError("need 1 <= k_min <= k_max", field="k_min")
        if self.k_step < 1:
            raise ConfigError("k_step must be >= 1", field="k_step")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1", field="jobs")

    def k_values(self) -> list[int]:
        return list(range(self.k_min, self.k_max + 1, self.k_step))


@dataclass(frozen=True)
class MetricRow:
    K: int
    status: str  # "ok" | "failed"
    cao: float | None = None
    arun: float | None = None
    umass: float | None = None
    c_v: float | None = None
    model_digest: str | None = None
    error: str | None = None


@dataclass(frozen=True)
class MetricTable:
    rows: tuple[MetricRow, ...]

    def ok_rows(self) -> list[MetricRow]:
        return [r for r in self.rows if r.status == "ok"]

    def to_csv(self) -> str:
        lines = ["K,cao,arun,umass,c_v,status,model_digest"]
        for r in self.rows:
            vals = [
                "" if v is None else repr(v) for v in (r.cao, r.arun, r.umass, r.c_v)
            ]
            lines.append(
                f"{r.K},{vals[0]},{vals[1]},{vals[2]},{vals[3]},{r.status},"
                f"{r.model_digest or ''}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        """Rows plus per-metric min-max normalized curves for plotting."""
        rows = [
            {
                "K": r.K,
                "cao": r.cao,
                "arun": r.arun,
                "umass": r.umass,
                "c_v": r.c_v,
                "status": r.status,
                "model_digest": r.model_digest,
                "error": r.error,
            }
            for r in self.rows
        ]
        curves = {}
        ok = self.ok_rows()
        for name in METRIC_DIRECTIONS:
            values = [getattr(r, name) for r in ok]
            if values:
                lo, hi = min(values), max(values)
                span = hi - lo
                curves[name] = [
                    {"K": r.K, "value": getattr(r, name),
                     "normalized": 0.0 if span == 0 else (getattr(r, name) - lo) / span}
                    for r in ok
                ]
            else:
                curves[name] = []
        return {"rows": rows, "normalized_curves": curves}

    @classmethod
    def from_json(cls, obj: dict) -> "MetricTable":
        return cls(
            rows=tuple(
                MetricRow(
                    K=r["K"],
                    status=r["status"],
                    cao=r.get("cao"),
                    arun=r.get("arun"),
                    umass=r.get("umass"),
                    c_v=r.get("c_v"),
                    model_digest=r.get("model_digest"),
                    error=r.get("error"),
                )
                for r in obj["rows"]
            )
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "MetricTable":
        return cls.from_json(json.loads(Path(path).read_text()))


def _evaluate_one(corpus: Corpus, config: SweepConfig, k: int) -> MetricRow:
    try:
        lda_cfg = replace(config.base, K=k, seed=mix_seed(config.base.seed, k))
        model = train_lda(corpus, lda_cfg)
        _, umass_mean = umass_coherence(model, corpus, config.coherence_top_n)
        _, cv_mean = cv_coherence(
            model, corpus, config.coherence_top_n, config.window_size
        )
        return MetricRow(
            K=k,
            status="ok",
            cao=cao_metric(model.phi),
            arun=arun_metric(model.phi, model.theta, corpus.doc_lengths),
            umass=umass_mean,
            c_v=cv_mean,
            model_digest=model.digest,
        )
    except Exception as exc:  # row-level isolation: one bad K must not kill the sweep
        return MetricRow(K=k, status="failed", error=f"{type(exc).__name__}: {exc}")


def sweep(corpus: Corpus, config: SweepConfig) -> MetricTable:
    """One model per K with per-K seed mix(base_seed, K); results do not
    depend on the jobs count or completion order."""
    config.validate()
    ks = config.k_values()
    if config.jobs == 1:
        rows = [_evaluate_one(corpus, config, k) for k in ks]
    else:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(lambda k: _evaluate_one(corpus, config, k), ks))
    rows.sort(key=lambda r: r.K)
    table = MetricTable(rows=tuple(rows))
    if not table.ok_rows():
        errors = "; ".join(f"K={r.K}: {r.error}" for r in rows[:3])
        raise SweepError(f"every K failed ({errors})")
    return table


def select_k(table: MetricTable, policy: str = "rank_sum") -> tuple[int, list[dict]]:
    """Rank K values per metric (rank 0 = best), pick the K minimizing the
    rank sum; ties go to the smaller K. Returns the winner plus a per-K
    report for human override."""
    if policy != "rank_sum":
        raise SelectionError(f"unknown policy {policy!r}")
    ok = table.ok_rows()
    if len(ok) < 2:
        raise SelectionError("need at least 2 non-failed rows to select K")
    ranks: dict[int, dict[str, int]] = {r.K: {} for r in ok}
    for name, larger_better in METRIC_DIRECTIONS.items():
        keyed = sorted(
            ok, key=lambda r: ((-1 if larger_better else 1) * getattr(r, name), r.K)
        )
        for rank, row in enumerate(keyed):
            ranks[row.K][name] = rank
    sums = {k: sum(v.values()) for k, v in ranks.items()}
    best = min(sums, key=lambda k: (sums[k], k))
    report = [
        {
            "K": r.K,
            "cao": r.cao,
            "arun": r.arun,
            "umass": r.umass,
            "c_v": r.c_v,
            "ranks": ranks[r.K],
            "rank_sum": sums[r.K],
            "selected": r.K == best,
        }
        for r in ok
    ]
    return best, report
