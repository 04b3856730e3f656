from .expand import (
    METHODS,
    ConceptTermSet,
    embed_terms,
    expand,
    expand_embedding,
    expand_frequency,
    expand_kl,
)
from .model import (
    HierarchyNode,
    QdtmConfig,
    TopicHierarchy,
    coherence_of_hierarchy,
    node_top_words,
    run_qdtm,
)
from .query import Query, load_queries, save_queries

__all__ = [
    "METHODS",
    "ConceptTermSet",
    "embed_terms",
    "expand",
    "expand_embedding",
    "expand_frequency",
    "expand_kl",
    "HierarchyNode",
    "QdtmConfig",
    "TopicHierarchy",
    "coherence_of_hierarchy",
    "node_top_words",
    "run_qdtm",
    "Query",
    "load_queries",
    "save_queries",
]
