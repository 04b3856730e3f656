from .concurrence import (
    ConcurrenceReport,
    FinalTopic,
    Theme,
    TopicLabeling,
    bundled_labelings,
    bundled_themes,
    compare,
    load_labelings,
    load_themes,
)
from .ledger import (
    LedgerRow,
    TermLedger,
    build_term_ledger,
    build_term_ledger_from_models,
    bundled_proposals,
    bundled_term_selections,
    ledger_to_queries,
    topic_term_lists,
)

__all__ = [
    "ConcurrenceReport",
    "FinalTopic",
    "Theme",
    "TopicLabeling",
    "bundled_labelings",
    "bundled_themes",
    "compare",
    "load_labelings",
    "load_themes",
    "LedgerRow",
    "TermLedger",
    "build_term_ledger",
    "build_term_ledger_from_models",
    "bundled_proposals",
    "bundled_term_selections",
    "ledger_to_queries",
    "topic_term_lists",
]
