from .model import (
    LdaConfig,
    RankedDocument,
    RankedTerm,
    TopicModel,
    export_topics_csv,
    load_model,
    permute_topics,
    save_model,
    top_documents,
    top_terms,
    train_lda,
)

__all__ = [
    "LdaConfig",
    "RankedDocument",
    "RankedTerm",
    "TopicModel",
    "export_topics_csv",
    "load_model",
    "permute_topics",
    "save_model",
    "top_documents",
    "top_terms",
    "train_lda",
]
