"""FastAPI service exposing the project workbench.

All routes live under /api/v1. Domain errors map to JSON bodies of the
shape {code, message, field?}; revision tokens double as entity tags
(ETag on reads, If-Match honored on writes).
"""

from __future__ import annotations

import io
import json
from pathlib import Path

from fastapi import FastAPI, File, Form, Header, Request, Response, UploadFile
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..corpus import PreprocessConfig
from ..errors import CgtError, ConfigError, ConflictError, NotFoundError
from ..validation import build_term_ledger_from_models, bundled_proposals, compare
from ..lda import load_model
from .runs import RunManager, load_run_hierarchy, load_run_metrics, queries_from_ledger
from .schemas import (
    CorpusOut,
    JudgmentPut,
    LabelingPut,
    LedgerBuild,
    ProjectCreate,
    ProjectOut,
    QdtmStart,
    RunCreate,
    SelectionPut,
)
from .store import ProjectStore
from .views import RunNotDone, get_topic_view

_STATUS_CODES = {
    NotFoundError: 404,
    ConflictError: 409,
    ConfigError: 422,
    RunNotDone: 409,
}


def create_app(root: str | Path, pool_size: int = 2,
               static_dir: str | Path | None = None) -> FastAPI:
    store = ProjectStore(root)
    manager = RunManager(store, pool_size=pool_size)
    app = FastAPI(title="cgtlab workbench", version="0.1.0")
    app.state.store = store
    app.state.manager = manager

    @app.exception_handler(CgtError)
    async def _domain_error(request: Request, exc: CgtError):
        status = 400
        for klass, code in _STATUS_CODES.items():
            if isinstance(exc, klass):
                status = code
                break
        body = {"code": exc.code, "message": str(exc)}
        field = getattr(exc, "field", None)
        if field:
            body["field"] = field
        return JSONResponse(status_code=status, content=body)

    # ------------------------------------------------------- projects

    @app.post("/api/v1/projects", response_model=ProjectOut, status_code=201)
    def create_project(body: ProjectCreate):
        info = store.create_project(body.name)
        return ProjectOut(**info.__dict__)

    @app.get("/api/v1/projects")
    def list_projects():
        return {"projects": [p.__dict__ for p in store.list_projects()]}

    @app.get("/api/v1/projects/{project_id}")
    def get_project(project_id: str):
        return store.get_project(project_id)

    @app.get("/api/v1/projects/{project_id}/themes")
    def get_themes(project_id: str):
        return {
            "themes": [
                {
                    "theme_id": t.theme_id,
                    "label": t.label,
                    "description": t.description,
                    "comparable": t.comparable,
                }
                for t in store.themes(project_id)
            ]
        }

    @app.post("/api/v1/projects/{project_id}/corpus", response_model=CorpusOut)
    def upload_corpus(
        project_id: str,
        file: UploadFile = File(...),
        preprocess: str = Form(default=""),
        salt: str = Form(default=""),
    ):
        config = PreprocessConfig()
        if preprocess:
            overrides = json.loads(preprocess)
            config = PreprocessConfig(
                stoplist=(
                    frozenset(overrides["stoplist"])
                    if "stoplist" in overrides
                    else config.stoplist
                ),
                min_token_len=overrides.get("min_token_len", config.min_token_len),
                min_df=overrides.get("min_df", config.min_df),
                max_df_ratio=overrides.get("max_df_ratio", config.max_df_ratio),
                lemma_exceptions=overrides.get(
                    "lemma_exceptions", config.lemma_exceptions
                ),
                keep_numbers=overrides.get("keep_numbers", config.keep_numbers),
            )
        stream = io.StringIO(file.file.read().decode("utf-8"))
        result = store.put_corpus_from_jsonl(project_id, stream, config, salt=salt)
        return CorpusOut(**result)

    # ----------------------------------------------------------- runs

    @app.post("/api/v1/projects/{project_id}/runs", status_code=202)
    def start_run(project_id: str, body: RunCreate):
        run_id = manager.start_run(project_id, body.kind, body.params)
        return {"run_id": run_id}

    @app.get("/api/v1/projects/{project_id}/runs")
    def list_runs(project_id: str):
        return {
            "runs": [store.run_status(project_id, r)
                     for r in store.list_runs(project_id)]
        }

    @app.get("/api/v1/runs/{run_id}")
    def run_status(run_id: str):
        project_id = store.project_of_run(run_id)
        return store.run_status(project_id, run_id)

    @app.get("/api/v1/runs/{run_id}/metrics")
    def run_metrics(run_id: str):
        return load_run_metrics(store, run_id)

    @app.get("/api/v1/runs/{run_id}/hierarchy")
    def run_hierarchy(run_id: str):
        return load_run_hierarchy(store, run_id)

    @app.get("/api/v1/runs/{run_id}/topics/{topic_id}")
    def topic_view(run_id: str, topic_id: int, response: Response,
                   n_terms: int = 20, n_docs: int = 5):
        view = get_topic_view(store, run_id, topic_id, n_terms, n_docs)
        if view.get("labeling"):
            response.headers["ETag"] = view["labeling"]["revision"]
        return view

    @app.put("/api/v1/runs/{run_id}/topics/{topic_id}/labeling")
    def put_labeling(run_id: str, topic_id: int, body: LabelingPut,
                     response: Response,
                     if_match: str | None = Header(default=None)):
        project_id = store.project_of_run(run_id)
        record = store.put_labeling(
            project_id,
            run_id,
            topic_id,
            labels=body.labels,
            theme_refs=body.theme_refs,
            excluded_terms=body.excluded_terms,
            annotator=body.annotator,
            revision=body.revision or if_match,
        )
        response.headers["ETag"] = record["revision"]
        return record

    @app.put("/api/v1/nodes/{node_ref:path}/judgment")
    def put_judgment(node_ref: str, body: JudgmentPut, response: Response,
                     if_match: str | None = Header(default=None)):
        run_id = node_ref.split(":", 1)[0]
        project_id = store.project_of_run(run_id)
        record = store.put_judgment(
            project_id,
            node_ref,
            coherent=body.coherent,
            include=body.include,
            note=body.note,
            annotator=body.annotator,
            revision=body.revision or if_match,
        )
        response.headers["ETag"] = record["revision"]
        return record

    # ------------------------------------------------------ validation

    @app.get("/api/v1/projects/{project_id}/compare")
    def compare_runs(project_id: str, runs: str):
        run_ids = [r for r in runs.split(",") if r]
        themes = store.themes(project_id)
        labelings = store.labelings_for_compare(project_id, run_ids)
        report = compare(themes, labelings)
        return report.to_json()

    @app.post("/api/v1/projects/{project_id}/ledger")
    def build_ledger(project_id: str, body: LedgerBuild):
        themes = store.themes(project_id)
        labelings = store.labelings_for_compare(project_id, [body.run_a, body.run_b])
        report = compare(themes, labelings)
        corpus = store.load_corpus(project_id)
        models = {}
        for rid in (body.run_a, body.run_b):
            status = store.run_status(project_id, rid)
            if status.get("status") != "done" or status.get("kind") != "lda":
                raise ConflictError(f"run {rid!r} is not a completed topic-model run")
            models[rid] = (load_model(store.run_dir(project_id, rid) / "model"), corpus)
        exclusions = {
            rid: store.excluded_terms(project_id, rid)
            for rid in (body.run_a, body.run_b)
        }
        proposals = dict(body.proposals)
        if body.use_bundled_proposals:
            proposals = bundled_proposals() | proposals
        ledger = build_term_ledger_from_models(
            report, models, labelings, top_n=body.top_n,
            exclusions=exclusions, proposals=proposals,
        )
        store.put_ledger(project_id, ledger.to_json())
        return ledger.to_json()

    @app.get("/api/v1/projects/{project_id}/ledger")
    def get_ledger(project_id: str):
        return {
            "ledger": store.ledger(project_id),
            "selections": store.ledger_selections(project_id),
        }

    @app.put("/api/v1/projects/{project_id}/ledger/{row_key:path}/selection")
    def put_selection(project_id: str, row_key: str, body: SelectionPut,
                      response: Response,
                      if_match: str | None = Header(default=None)):
        record = store.put_ledger_selection(
            project_id,
            row_key,
            excluded_terms=body.excluded_terms,
            annotator=body.annotator,
            revision=body.revision or if_match,
        )
        response.headers["ETag"] = record["revision"]
        return record

    @app.get("/api/v1/projects/{project_id}/labelings")
    def get_labelings(project_id: str):
        return {"labelings": store.labelings(project_id)}

    @app.get("/api/v1/projects/{project_id}/judgments")
    def get_judgments(project_id: str):
        return {"judgments": store.judgments(project_id)}

    # ------------------------------------------------------------ qdtm

    @app.post("/api/v1/projects/{project_id}/qdtm", status_code=202)
    def start_qdtm(project_id: str, body: QdtmStart):
        params = dict(body.config)
        if body.queries is not None:
            params["queries"] = body.queries
        elif body.from_ledger:
            params["from_ledger"] = True
            queries = queries_from_ledger(store, project_id)
            save = {"queries": [
                {"label": q.label, "terms": sorted(q.terms)} for q in queries
            ]}
            store.put_queries(project_id, save)
        else:
            raise ConfigError("provide queries or from_ledger=true", field="queries")
        run_id = manager.start_run(project_id, "qdtm", {
            "config": body.config, **(
                {"queries": params["queries"]} if "queries" in params
                else {"from_ledger": True}
            ),
        })
        return {"run_id": run_id}

    @app.get("/api/v1/projects/{project_id}/queries")
    def get_queries(project_id: str):
        d = store.project_dir(project_id)
        path = d / "queries.json"
        if not path.exists():
            raise NotFoundError("no queries built yet")
        return json.loads(path.read_text(encoding="utf-8"))

    @app.get("/api/v1/projects/{project_id}/sample")
    def sample_documents(project_id: str, n: int = 10, seed: int = 0):
        """Seeded uniform document sample for close reading; the choice is
        recorded in the audit log."""
        from ..seeds import rng_for

        corpus = store.load_corpus(project_id)
        texts = store.load_post_texts(project_id)
        n = min(n, corpus.n_docs)
        rng = rng_for(seed, 0x52454144)
        picked = sorted(rng.choice(corpus.n_docs, size=n, replace=False).tolist())
        store.append_audit(project_id, "documents_sampled",
                           {"n": n, "seed": seed, "doc_ids": picked})
        return {
            "n": n,
            "seed": seed,
            "documents": [
                {
                    "doc_id": d,
                    "source_id": corpus.documents[d].source_id,
                    "text": texts.get(corpus.documents[d].source_id, ""),
                }
                for d in picked
            ],
        }

    # ---------------------------------------------------------- export

    @app.get("/api/v1/projects/{project_id}/export")
    def export_project(project_id: str):
        data = store.export_bundle(project_id)
        return Response(
            content=data,
            media_type="application/zip",
            headers={
                "Content-Disposition": f'attachment; filename="{project_id}.zip"'
            },
        )

    if static_dir and Path(static_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
