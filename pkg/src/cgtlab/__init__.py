"""Computational grounded theory workbench.

Pipeline: ingest social-media dumps, build a tokenized corpus, train LDA
models with multi-metric selection over the number of topics, validate
topics against hand-coded themes, curate per-topic query terms, and grow
query-driven hierarchical topic models. A FastAPI service and a CLI expose
the same project-directory operations.
"""

__version__ = "0.1.0"
