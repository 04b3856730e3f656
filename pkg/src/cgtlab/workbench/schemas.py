"""Request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class ErrorBody(BaseModel):
    code: str
    message: str
    field: str | None = None


class ProjectCreate(BaseModel):
    name: str = Field(min_length=1)


class ProjectOut(BaseModel):
    project_id: str
    name: str
    created_at: str
    corpus_digest: str | None = None


class CorpusOut(BaseModel):
    digest: str
    n_docs: int
    vocab_size: int
    n_tokens: int
    rejects: list[dict] = []


class RunCreate(BaseModel):
    kind: str
    params: dict = {}


class RunOut(BaseModel):
    run_id: str
    project_id: str
    kind: str
    status: str
    params: dict
    error: str | None = None
    result: dict | None = None


class LabelingPut(BaseModel):
    labels: list[str]
    theme_refs: list[int] = []
    excluded_terms: list[str] = []
    annotator: str = ""
    revision: str | None = None


class JudgmentPut(BaseModel):
    coherent: bool
    include: bool
    note: str = ""
    annotator: str = ""
    revision: str | None = None


class LedgerBuild(BaseModel):
    run_a: str
    run_b: str
    top_n: int = 20
    proposals: dict[int, list[str]] = {}
    use_bundled_proposals: bool = False


class SelectionPut(BaseModel):
    excluded_terms: list[str]
    annotator: str = ""
    revision: str | None = None


class QdtmStart(BaseModel):
    queries: list[dict] | None = None
    from_ledger: bool = False
    config: dict = {}
