"""Project directory persistence.

One directory per project holding JSON and binary artifacts, no database.
Human mutations (labelings, judgments, ledger selections) go through
optimistic revision checks, land atomically, and append full payloads to
an audit log so the state can be replayed from scratch. Completed run
artifacts are content-addressed and never mutated.
"""

from __future__ import annotations

import io
import json
import os
import re
import threading
import time
import zipfile
from dataclasses import dataclass
from pathlib import Path

from ..corpus import (
    Corpus,
    PreprocessConfig,
    RawPost,
    build_corpus,
    ingest_jsonl,
    load_corpus,
    save_corpus,
    write_jsonl,
)
from ..errors import ConflictError, NotFoundError
from ..seeds import digest_json
from ..validation import Theme, TopicLabeling, bundled_themes

_SLUG_RE = re.compile(r"[^a-z0-9]+")

HUMAN_STATE_FILES = ("labelings.json", "judgments.json", "ledger.json",
                     "ledger_selections.json", "queries.json")


def _slug(name: str) -> str:
    s = _SLUG_RE.sub("-", name.lower()).strip("-")
    return s or "project"


def _read_json(path: Path, default):
    if not path.exists():
        return default
    return json.loads(path.read_text(encoding="utf-8"))


def _write_json_atomic(path: Path, obj) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def record_revision(record: dict) -> str:
    """Revision token: content digest of the record minus its own token."""
    clean = {k: v for k, v in record.items() if k != "revision"}
    return digest_json(clean)[:16]


@dataclass
class ProjectInfo:
    project_id: str
    name: str
    created_at: str
    corpus_digest: str | None


class ProjectStore:
    """All reads and writes for a root directory of projects."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    # ------------------------------------------------------------ locks

    def _lock(self, project_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(project_id, threading.Lock())

    # --------------------------------------------------------- projects

    def project_dir(self, project_id: str) -> Path:
        d = self.root / project_id
        if not (d / "project.json").exists():
            raise NotFoundError(f"no project {project_id!r}")
        return d

    def list_projects(self) -> list[ProjectInfo]:
        out = []
        for p in sorted(self.root.iterdir()):
            if (p / "project.json").exists():
                meta = _read_json(p / "project.json", {})
                out.append(
                    ProjectInfo(
                        project_id=meta["project_id"],
                        name=meta["name"],
                        created_at=meta.get("created_at", ""),
                        corpus_digest=meta.get("corpus_digest"),
                    )
                )
        return out

    def create_project(self, name: str) -> ProjectInfo:
        if not name.strip():
            raise ConflictError("project name must be non-empty")
        project_id = _slug(name)
        d = self.root / project_id
        if (d / "project.json").exists():
            raise ConflictError(f"project named {name!r} already exists")
        d.mkdir(parents=True, exist_ok=True)
        (d / "runs").mkdir(exist_ok=True)
        meta = {
            "project_id": project_id,
            "name": name,
            "created_at": _now(),
            "corpus_digest": None,
        }
        _write_json_atomic(d / "project.json", meta)
        themes = [
            {
                "theme_id": t.theme_id,
                "label": t.label,
                "description": t.description,
                "comparable": t.comparable,
            }
            for t in bundled_themes()
        ]
        _write_json_atomic(d / "themes.json", {"themes": themes})
        self.append_audit(project_id, "project_created", {"name": name})
        return ProjectInfo(**meta)

    def get_project(self, project_id: str) -> dict:
        d = self.project_dir(project_id)
        meta = _read_json(d / "project.json", {})
        runs = [self.run_status(project_id, r) for r in self.list_runs(project_id)]
        return {
            **meta,
            "runs": runs,
            "has_ledger": (d / "ledger.json").exists(),
            "revisions": self._entity_revisions(d),
        }

    def _entity_revisions(self, d: Path) -> dict:
        out = {}
        for name in HUMAN_STATE_FILES:
            p = d / name
            if p.exists():
                out[name] = digest_json(_read_json(p, None))[:16]
        return out

    # ------------------------------------------------------------ audit

    def append_audit(self, project_id: str, action: str, payload: dict,
                     actor: str = "") -> None:
        d = self.root / project_id
        entry = {"ts": _now(), "actor": actor, "action": action, "payload": payload}
        with open(d / "audit.jsonl", "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True, ensure_ascii=False) + "\n")

    def read_audit(self, project_id: str) -> list[dict]:
        d = self.project_dir(project_id)
        path = d / "audit.jsonl"
        if not path.exists():
            return []
        return [json.loads(l) for l in path.read_text(encoding="utf-8").splitlines() if l]

    # ----------------------------------------------------------- corpus

    def put_corpus_from_jsonl(
        self,
        project_id: str,
        stream,
        config: PreprocessConfig | None = None,
        salt: str = "",
    ) -> dict:
        config = config or PreprocessConfig()
        result = ingest_jsonl(stream, salt=salt)
        corpus = build_corpus(result.posts, config)
        return self.put_corpus(
            project_id,
            corpus,
            posts=result.posts,
            config=config,
            extra={"rejects": [{"line_no": r.line_no, "reason": r.reason}
                               for r in result.rejects]},
        )

    def put_corpus(
        self,
        project_id: str,
        corpus: Corpus,
        posts: list[RawPost],
        config: PreprocessConfig | None,
        extra: dict | None = None,
    ) -> dict:
        with self._lock(project_id):
            d = self.project_dir(project_id)
            cdir = d / "corpus"
            save_corpus(corpus, cdir)
            with open(cdir / "posts.jsonl", "w", encoding="utf-8") as fh:
                write_jsonl(posts, fh)
            if config is not None:
                _write_json_atomic(cdir / "preprocess.json", _config_to_json(config))
            meta = _read_json(d / "project.json", {})
            meta["corpus_digest"] = corpus.digest
            _write_json_atomic(d / "project.json", meta)
            self.append_audit(project_id, "corpus_built", {
                "digest": corpus.digest,
                "n_docs": corpus.n_docs,
                "vocab_size": len(corpus.vocabulary),
            })
            return {
                "digest": corpus.digest,
                "n_docs": corpus.n_docs,
                "vocab_size": len(corpus.vocabulary),
                "n_tokens": corpus.n_tokens,
                **(extra or {}),
            }

    def load_corpus(self, project_id: str) -> Corpus:
        d = self.project_dir(project_id)
        if not (d / "corpus" / "manifest.json").exists():
            raise NotFoundError(f"project {project_id!r} has no corpus")
        return load_corpus(d / "corpus")

    def load_preprocess_config(self, project_id: str) -> PreprocessConfig:
        d = self.project_dir(project_id)
        obj = _read_json(d / "corpus" / "preprocess.json", None)
        if obj is None:
            return PreprocessConfig()
        return _config_from_json(obj)

    def load_post_texts(self, project_id: str) -> dict[str, str]:
        d = self.project_dir(project_id)
        path = d / "corpus" / "posts.jsonl"
        out = {}
        if path.exists():
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    obj = json.loads(line)
                    out[obj["id"]] = obj["text"]
        return out

    # ------------------------------------------------------------- runs

    def list_runs(self, project_id: str) -> list[str]:
        d = self.project_dir(project_id)
        return sorted(p.name for p in (d / "runs").iterdir() if p.is_dir())

    def new_run_id(self, project_id: str, kind: str) -> str:
        # ids are unique across the whole root so /runs/{id} resolves
        # without a project scope
        with self._guard:
            index = _read_json(self.root / "runs_index.json", {})
            n = sum(1 for rid in index if rid.startswith(f"{kind}-")) + 1
            run_id = f"{kind}-{n:04d}"
            while run_id in index:
                n += 1
                run_id = f"{kind}-{n:04d}"
            index[run_id] = project_id
            _write_json_atomic(self.root / "runs_index.json", index)
        (self.project_dir(project_id) / "runs" / run_id).mkdir(parents=True)
        return run_id

    def project_of_run(self, run_id: str) -> str:
        index = _read_json(self.root / "runs_index.json", {})
        if run_id not in index:
            raise NotFoundError(f"no run {run_id!r}")
        return index[run_id]

    def run_dir(self, project_id: str, run_id: str) -> Path:
        d = self.project_dir(project_id) / "runs" / run_id
        if not d.is_dir():
            raise NotFoundError(f"no run {run_id!r} in project {project_id!r}")
        return d

    def write_run_status(self, project_id: str, run_id: str, status: dict) -> None:
        _write_json_atomic(self.run_dir(project_id, run_id) / "status.json", status)

    def run_status(self, project_id: str, run_id: str) -> dict:
        return _read_json(self.run_dir(project_id, run_id) / "status.json", {})

    # -------------------------------------------------------- labelings

    def labelings(self, project_id: str) -> dict:
        d = self.project_dir(project_id)
        return _read_json(d / "labelings.json", {})

    def put_labeling(
        self,
        project_id: str,
        run_id: str,
        topic_id: int,
        labels: list[str],
        theme_refs: list[int],
        excluded_terms: list[str] | None = None,
        annotator: str = "",
        revision: str | None = None,
    ) -> dict:
        record = {
            "labels": list(labels),
            "theme_refs": list(theme_refs),
            "excluded_terms": sorted(excluded_terms or []),
            "annotator": annotator,
            "timestamp": _now(),
        }
        with self._lock(project_id):
            d = self.project_dir(project_id)
            state = _read_json(d / "labelings.json", {})
            bucket = state.setdefault(run_id, {})
            key = str(topic_id)
            current = bucket.get(key)
            _check_revision(current, revision, f"labeling {run_id}/{topic_id}")
            record["revision"] = record_revision(record)
            bucket[key] = record
            _write_json_atomic(d / "labelings.json", state)
            self.append_audit(project_id, "labeling_put", {
                "run_id": run_id, "topic_id": topic_id, **record,
            }, actor=annotator)
            return record

    def labelings_for_compare(self, project_id: str, run_ids: list[str]
                              ) -> dict[str, list[TopicLabeling]]:
        state = self.labelings(project_id)
        out: dict[str, list[TopicLabeling]] = {}
        for rid in run_ids:
            labs = []
            for key, rec in sorted(state.get(rid, {}).items(), key=lambda kv: int(kv[0])):
                labs.append(
                    TopicLabeling(
                        run_id=rid,
                        topic_id=int(key),
                        labels=tuple(rec["labels"]),
                        theme_refs=tuple(rec["theme_refs"]),
                        annotator=rec.get("annotator", ""),
                        timestamp=rec.get("timestamp", ""),
                    )
                )
            out[rid] = labs
        return out

    def excluded_terms(self, project_id: str, run_id: str) -> dict[int, set[str]]:
        state = self.labelings(project_id).get(run_id, {})
        return {
            int(k): set(rec.get("excluded_terms", []))
            for k, rec in state.items()
            if rec.get("excluded_terms")
        }

    # -------------------------------------------------------- judgments

    def judgments(self, project_id: str) -> dict:
        return _read_json(self.project_dir(project_id) / "judgments.json", {})

    def put_judgment(
        self,
        project_id: str,
        node_ref: str,
        coherent: bool,
        include: bool,
        note: str = "",
        annotator: str = "",
        revision: str | None = None,
    ) -> dict:
        record = {
            "coherent": bool(coherent),
            "include": bool(include),
            "note": note,
            "annotator": annotator,
            "timestamp": _now(),
        }
        with self._lock(project_id):
            d = self.project_dir(project_id)
            state = _read_json(d / "judgments.json", {})
            bucket = state.setdefault(node_ref, {})
            current = bucket.get(annotator)
            _check_revision(current, revision, f"judgment {node_ref}")
            record["revision"] = record_revision(record)
            bucket[annotator] = record
            _write_json_atomic(d / "judgments.json", state)
            self.append_audit(project_id, "judgment_put", {
                "node_ref": node_ref, **record,
            }, actor=annotator)
            return record

    # ----------------------------------------------------------- ledger

    def put_ledger(self, project_id: str, ledger_json: dict) -> None:
        with self._lock(project_id):
            d = self.project_dir(project_id)
            _write_json_atomic(d / "ledger.json", ledger_json)
            self.append_audit(project_id, "ledger_built", {"ledger": ledger_json})

    def ledger(self, project_id: str) -> dict:
        d = self.project_dir(project_id)
        obj = _read_json(d / "ledger.json", None)
        if obj is None:
            raise NotFoundError(f"project {project_id!r} has no ledger")
        return obj

    def ledger_selections(self, project_id: str) -> dict:
        return _read_json(self.project_dir(project_id) / "ledger_selections.json", {})

    def put_ledger_selection(
        self,
        project_id: str,
        row_key: str,
        excluded_terms: list[str],
        annotator: str = "",
        revision: str | None = None,
    ) -> dict:
        record = {
            "excluded_terms": sorted(excluded_terms),
            "annotator": annotator,
            "timestamp": _now(),
        }
        with self._lock(project_id):
            d = self.project_dir(project_id)
            ledger = _read_json(d / "ledger.json", None)
            if ledger is None:
                raise NotFoundError("no ledger to select from")
            if row_key not in {r["key"] for r in ledger["rows"]}:
                raise NotFoundError(f"no ledger row {row_key!r}")
            state = _read_json(d / "ledger_selections.json", {})
            current = state.get(row_key)
            _check_revision(current, revision, f"selection {row_key}")
            record["revision"] = record_revision(record)
            state[row_key] = record
            _write_json_atomic(d / "ledger_selections.json", state)
            self.append_audit(project_id, "selection_put", {
                "row_key": row_key, **record,
            }, actor=annotator)
            return record

    def put_queries(self, project_id: str, queries_json: dict) -> None:
        with self._lock(project_id):
            d = self.project_dir(project_id)
            _write_json_atomic(d / "queries.json", queries_json)
            self.append_audit(project_id, "queries_built", {"queries": queries_json})

    # ----------------------------------------------------------- themes

    def themes(self, project_id: str) -> list[Theme]:
        d = self.project_dir(project_id)
        obj = _read_json(d / "themes.json", {"themes": []})
        return [Theme(**t) for t in obj["themes"]]

    # ----------------------------------------------------- export/import

    def export_bundle(self, project_id: str) -> bytes:
        d = self.project_dir(project_id)
        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
            for path in sorted(d.rglob("*")):
                if path.is_file() and not path.name.endswith(".tmp"):
                    zf.write(path, arcname=str(path.relative_to(d)))
        return buf.getvalue()

    def import_bundle(self, data: bytes) -> ProjectInfo:
        with zipfile.ZipFile(io.BytesIO(data)) as zf:
            meta = json.loads(zf.read("project.json"))
            project_id = meta["project_id"]
            target = self.root / project_id
            if (target / "project.json").exists():
                raise ConflictError(f"project {project_id!r} already exists")
            incoming = {
                name.split("/")[1]
                for name in zf.namelist()
                if name.startswith("runs/") and name.count("/") >= 2
            }
            index = _read_json(self.root / "runs_index.json", {})
            clashes = incoming & set(index)
            if clashes:
                raise ConflictError(
                    f"bundle run ids already exist here: {sorted(clashes)}"
                )
            for name in zf.namelist():
                dest = target / name
                if not str(dest.resolve()).startswith(str(target.resolve())):
                    raise ConflictError(f"unsafe path in bundle: {name}")
                dest.parent.mkdir(parents=True, exist_ok=True)
                dest.write_bytes(zf.read(name))
        with self._guard:
            index = _read_json(self.root / "runs_index.json", {})
            for run_id in self.list_runs(project_id):
                index[run_id] = project_id
            _write_json_atomic(self.root / "runs_index.json", index)
        return ProjectInfo(
            project_id=project_id,
            name=meta["name"],
            created_at=meta.get("created_at", ""),
            corpus_digest=meta.get("corpus_digest"),
        )

    # ----------------------------------------------------------- replay

    def replay_audit(self, project_id: str) -> dict:
        """Reconstruct the human-entered state purely from the audit log;
        used to verify the log is complete."""
        labelings: dict = {}
        judgments: dict = {}
        selections: dict = {}
        ledger = None
        queries = None
        for entry in self.read_audit(project_id):
            action, p = entry["action"], entry["payload"]
            if action == "labeling_put":
                rec = {k: p[k] for k in ("labels", "theme_refs", "excluded_terms",
                                         "annotator", "timestamp", "revision")}
                labelings.setdefault(p["run_id"], {})[str(p["topic_id"])] = rec
            elif action == "judgment_put":
                rec = {k: p[k] for k in ("coherent", "include", "note",
                                         "annotator", "timestamp", "revision")}
                judgments.setdefault(p["node_ref"], {})[p["annotator"]] = rec
            elif action == "selection_put":
                rec = {k: p[k] for k in ("excluded_terms", "annotator",
                                         "timestamp", "revision")}
                selections[p["row_key"]] = rec
            elif action == "ledger_built":
                ledger = p["ledger"]
            elif action == "queries_built":
                queries = p["queries"]
        return {
            "labelings.json": labelings,
            "judgments.json": judgments,
            "ledger_selections.json": selections,
            "ledger.json": ledger,
            "queries.json": queries,
        }

    def human_state(self, project_id: str) -> dict:
        d = self.project_dir(project_id)
        return {name: _read_json(d / name, None) for name in HUMAN_STATE_FILES}


def _check_revision(current: dict | None, revision: str | None, what: str) -> None:
    if current is None:
        if revision is not None:
            raise ConflictError(f"{what}: no existing record for revision {revision}")
        return
    if revision != current.get("revision"):
        raise ConflictError(
            f"{what}: revision mismatch (expected {current.get('revision')})"
        )


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def _config_to_json(config: PreprocessConfig) -> dict:
    return {
        "stoplist": sorted(config.stoplist),
        "min_token_len": config.min_token_len,
        "min_df": config.min_df,
        "max_df_ratio": config.max_df_ratio,
        "lemma_exceptions": config.lemma_exceptions,
        "keep_numbers": config.keep_numbers,
    }


def _config_from_json(obj: dict) -> PreprocessConfig:
    return PreprocessConfig(
        stoplist=frozenset(obj["stoplist"]),
        min_token_len=obj["min_token_len"],
        min_df=obj["min_df"],
        max_df_ratio=obj["max_df_ratio"],
        lemma_exceptions=obj["lemma_exceptions"],
        keep_numbers=obj["keep_numbers"],
    )
