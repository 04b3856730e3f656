"""Read-side assembly: the topic view used by the reading room."""

from __future__ import annotations

from ..corpus import token_spans
from ..errors import CgtError, NotFoundError
from ..lda import load_model, top_documents, top_terms
from .store import ProjectStore


class RunNotDone(CgtError):
    """Mapped to HTTP 409: the run exists but has not finished."""

    code = "run_not_done"


def get_topic_view(
    store: ProjectStore,
    run_id: str,
    topic_id: int,
    n_terms: int = 20,
    n_docs: int = 5,
) -> dict:
    """Top terms with weights and top documents with original text, with
    occurrences of the top terms located by character spans."""
    project_id = store.project_of_run(run_id)
    status = store.run_status(project_id, run_id)
    if status.get("kind") != "lda":
        raise NotFoundError(f"run {run_id!r} is not a topic-model run")
    if status.get("status") != "done":
        raise RunNotDone(f"run {run_id!r} is {status.get('status')}")
    corpus = store.load_corpus(project_id)
    model = load_model(store.run_dir(project_id, run_id) / "model")
    if not 0 <= topic_id < model.K:
        raise NotFoundError(f"run {run_id!r} has no topic {topic_id}")

    config = store.load_preprocess_config(project_id)
    texts = store.load_post_texts(project_id)
    vocab = corpus.vocabulary

    terms = [
        {"term": vocab.terms[t.term_id], "weight": t.weight}
        for t in top_terms(model, topic_id, n_terms)
    ]
    term_set = {t["term"] for t in terms}
    labeling = store.labelings(project_id).get(run_id, {}).get(str(topic_id))

    documents = []
    for ranked in top_documents(model, topic_id, n_docs):
        doc = corpus.documents[ranked.doc_id]
        text = texts.get(doc.source_id, " ".join(
            vocab.terms[i] for i in doc.tokens
        ))
        spans = [
            {"term": lemma, "start": start, "end": end}
            for lemma, start, end in token_spans(text, config)
            if lemma in term_set
        ]
        documents.append(
            {
                "doc_id": ranked.doc_id,
                "source_id": doc.source_id,
                "weight": ranked.weight,
                "text": text,
                "highlights": spans,
            }
        )
    return {
        "run_id": run_id,
        "topic_id": topic_id,
        "n_topics": model.K,
        "terms": terms,
        "documents": documents,
        "labeling": labeling,
    }
