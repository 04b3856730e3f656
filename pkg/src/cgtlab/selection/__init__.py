from .metrics import (
    arun_metric,
    cao_metric,
    cv_coherence,
    cv_score_wordsets,
    umass_coherence,
    umass_score_wordsets,
)
from .sweep import METRIC_DIRECTIONS, MetricRow, MetricTable, SweepConfig, select_k, sweep

__all__ = [
    "arun_metric",
    "cao_metric",
    "cv_coherence",
    "cv_score_wordsets",
    "umass_coherence",
    "umass_score_wordsets",
    "METRIC_DIRECTIONS",
    "MetricRow",
    "MetricTable",
    "SweepConfig",
    "select_k",
    "sweep",
]
