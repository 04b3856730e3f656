"""Run lifecycle: validation, background execution, artifact persistence.

Runs execute on a bounded thread pool (the sampler kernels release the
GIL). Status moves queued -> running -> done|failed and is polled, never
pushed. Artifact files carry no timestamps so identical (operation, seed)
pairs produce byte-identical bytes whether launched here or from the CLI.
"""

from __future__ import annotations

import json
import traceback
from concurrent.futures import Future, ThreadPoolExecutor
from pathlib import Path

from ..errors import ConfigError, NotFoundError
from ..lda import LdaConfig, export_topics_csv, save_model, train_lda
from ..qdtm import QdtmConfig, Query, coherence_of_hierarchy, run_qdtm
from ..seeds import digest_json
from ..selection import SweepConfig, select_k, sweep
from .store import ProjectStore, _write_json_atomic

RUN_KINDS = ("lda", "sweep", "qdtm")


def parse_run_params(kind: str, params: dict):
    """Field-level validation before anything is queued."""
    try:
        if kind == "lda":
            cfg = LdaConfig.from_dict(params)
            cfg.validate()
            return cfg
        if kind == "sweep":
            base = LdaConfig.from_dict(params.get("base", {"K": 1}) | {"K": 1})
            cfg = SweepConfig(
                k_min=params["k_min"],
                k_max=params["k_max"],
                k_step=params.get("k_step", 1),
                base=base,
                coherence_top_n=params.get("coherence_top_n", 10),
                window_size=params.get("window_size", 110),
                jobs=params.get("jobs", 1),
            )
            cfg.validate()
            return cfg
        if kind == "qdtm":
            cfg = QdtmConfig.from_dict(params.get("config", params))
            cfg.validate()
            return cfg
    except KeyError as exc:
        raise ConfigError(f"missing required field {exc.args[0]!r}",
                          field=str(exc.args[0])) from exc
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown run kind {kind!r}", field="kind")


class RunManager:
    def __init__(self, store: ProjectStore, pool_size: int = 2):
        self.store = store
        self._pool = ThreadPoolExecutor(max_workers=pool_size)
        self._futures: dict[str, Future] = {}

    def start_run(self, project_id: str, kind: str, params: dict) -> str:
        if kind not in RUN_KINDS:
            raise ConfigError(f"kind must be one of {RUN_KINDS}", field="kind")
        config = parse_run_params(kind, params)
        corpus = self.store.load_corpus(project_id)  # raises if missing
        if kind == "qdtm":
            queries = self._resolve_queries(project_id, params)
        else:
            queries = None
        run_id = self.store.new_run_id(project_id, kind)
        self.store.write_run_status(project_id, run_id, {
            "run_id": run_id,
            "project_id": project_id,
            "kind": kind,
            "status": "queued",
            "params": params,
            "error": None,
            "result": None,
        })
        self.store.append_audit(project_id, "run_started", {
            "run_id": run_id, "kind": kind, "params": params,
        })
        future = self._pool.submit(
            self._execute, project_id, run_id, kind, config, corpus, queries
        )
        self._futures[run_id] = future
        return run_id

    def _resolve_queries(self, project_id: str, params: dict) -> list[Query]:
        if params.get("queries"):
            return [
                Query(label=q["label"], terms=frozenset(q["terms"]))
                for q in params["queries"]
            ]
        if params.get("from_ledger"):
            return queries_from_ledger(self.store, project_id)
        raise ConfigError("qdtm needs either queries or from_ledger=true",
                          field="queries")

    def wait(self, run_id: str, timeout: float | None = None) -> dict:
        future = self._futures.get(run_id)
        if future is not None:
            future.result(timeout=timeout)
        project_id = self.store.project_of_run(run_id)
        return self.store.run_status(project_id, run_id)

    def shutdown(self) -> None:
        self._pool.shutdown(wait=True)

    # ---------------------------------------------------------- execute

    def _execute(self, project_id, run_id, kind, config, corpus, queries):
        status = self.store.run_status(project_id, run_id)
        status["status"] = "running"
        self.store.write_run_status(project_id, run_id, status)
        run_dir = self.store.run_dir(project_id, run_id)
        try:
            if kind == "lda":
                result = run_lda_job(corpus, config, run_dir)
            elif kind == "sweep":
                result = run_sweep_job(corpus, config, run_dir)
            else:
                result = run_qdtm_job(corpus, config, queries, run_dir)
            status["status"] = "done"
            status["result"] = result
        except Exception as exc:
            status["status"] = "failed"
            status["error"] = f"{type(exc).__name__}: {exc}"
            status["traceback"] = traceback.format_exc()
        self.store.write_run_status(project_id, run_id, status)
        self.store.append_audit(project_id, "run_finished", {
            "run_id": run_id,
            "status": status["status"],
            "digest": (status.get("result") or {}).get("digest"),
        })


def run_lda_job(corpus, config: LdaConfig, run_dir: Path) -> dict:
    model = train_lda(corpus, config)
    save_model(model, run_dir / "model")
    export_topics_csv(model, corpus, run_dir / "topics.csv")
    return {"digest": model.digest, "K": model.K, "kind": "lda"}


def run_sweep_job(corpus, config: SweepConfig, run_dir: Path) -> dict:
    table = sweep(corpus, config)
    (run_dir / "metrics.csv").write_text(table.to_csv(), encoding="utf-8")
    table.save(run_dir / "metrics.json")
    recommended, report = (None, None)
    if len(table.ok_rows()) >= 2:
        recommended, report = select_k(table)
        _write_json_atomic(run_dir / "selection.json", {
            "recommended_k": recommended,
            "report": report,
        })
    return {
        "digest": digest_json(table.to_json()),
        "rows": len(table.rows),
        "recommended_k": recommended,
        "kind": "sweep",
    }


def run_qdtm_job(corpus, config: QdtmConfig, queries: list[Query],
                 run_dir: Path) -> dict:
    hierarchy = run_qdtm(corpus, queries, config)
    hierarchy = coherence_of_hierarchy(hierarchy, corpus)
    hierarchy.save(corpus, run_dir / "hierarchy.json")
    obj = hierarchy.to_json(corpus)
    return {
        "digest": digest_json(obj),
        "mains": len(hierarchy.mains),
        "unmodelable": [u["label"] for u in hierarchy.unmodelable],
        "kind": "qdtm",
    }


def queries_from_ledger(store: ProjectStore, project_id: str) -> list[Query]:
    """Queries from the stored ledger with curation-grid exclusions
    applied; excluded terms never reach the launched run."""
    from ..validation import TermLedger, ledger_to_queries

    ledger = TermLedger.from_json(store.ledger(project_id))
    selections = store.ledger_selections(project_id)
    queries = []
    for row, query in zip(ledger.rows, ledger_to_queries(ledger)):
        excluded = {
            t.lower()
            for t in selections.get(row.key, {}).get("excluded_terms", [])
        }
        terms = frozenset(t for t in query.terms if t not in excluded)
        if terms:
            queries.append(Query(label=query.label, terms=terms))
    if not queries:
        raise ConfigError("ledger selections removed every query term")
    return queries


def load_run_metrics(store: ProjectStore, run_id: str) -> dict:
    project_id = store.project_of_run(run_id)
    run_dir = store.run_dir(project_id, run_id)
    path = run_dir / "metrics.json"
    if not path.exists():
        raise NotFoundError(f"run {run_id!r} has no metric table")
    out = json.loads(path.read_text(encoding="utf-8"))
    sel = run_dir / "selection.json"
    if sel.exists():
        out["selection"] = json.loads(sel.read_text(encoding="utf-8"))
    return out


def load_run_hierarchy(store: ProjectStore, run_id: str) -> dict:
    project_id = store.project_of_run(run_id)
    path = store.run_dir(project_id, run_id) / "hierarchy.json"
    if not path.exists():
        raise NotFoundError(f"run {run_id!r} has no hierarchy")
    return json.loads(path.read_text(encoding="utf-8"))
