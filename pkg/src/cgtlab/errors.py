"""Exception types shared across the package.

Every error a caller is expected to handle derives from CgtError so the
CLI and the HTTP layer can map them to exit code 1 / a structured JSON
error without enumerating modules.
"""


class CgtError(Exception):
    """Base class for domain errors."""

    code = "error"


class IngestError(CgtError):
    code = "ingest_error"


class NetworkError(CgtError):
    """HTTP fetch failed after retries."""

    code = "network_error"

    def __init__(self, message: str, *, endpoint: str = "", retries: int = 0):
        super().__init__(message)
        self.endpoint = endpoint
        self.retries = retries


class BuildError(CgtError):
    code = "build_error"


class ConfigError(CgtError):
    """Invalid configuration values (caught before any work starts)."""

    code = "config_error"

    def __init__(self, message: str, *, field: str | None = None):
        super().__init__(message)
        self.field = field


class MetricError(CgtError):
    """Metric undefined for the given inputs (e.g. fewer than 2 topics)."""

    code = "metric_error"


class SweepError(CgtError):
    code = "sweep_error"


class SelectionError(CgtError):
    code = "selection_error"


class ConcurrenceError(CgtError):
    """Labelings reference unknown themes or runs."""

    code = "concurrence_error"


class LedgerError(CgtError):
    code = "ledger_error"


class ExpansionError(CgtError):
    code = "expansion_error"


class NotFoundError(CgtError):
    code = "not_found"


class ConflictError(CgtError):
    """Optimistic-concurrency failure or duplicate name."""

    code = "conflict"


class InternalError(CgtError):
    """Invariant violation that should be impossible; always a bug."""

    code = "internal_error"
