"""Exception hierarchy shared by every cellscope module."""

from __future__ import annotations


class CellscopeError(Exception):
    """Base class for all errors raised by cellscope."""


# ───────────────────────── ingest ─────────────────────────


class IngestError(CellscopeError):
    """A file could not be turned into a CellDocument."""

    def __init__(self, message: str, path: str = "") -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class MalformedJson(IngestError):
    """Notebook bytes are not JSON."""


class UnsupportedFormat(IngestError):
    """Notebook JSON is not an nbformat v4 document."""


class EncodingError(IngestError):
    """File bytes are not valid UTF-8."""


# ───────────────────────── lint ───────────────────────────


class DegenerateDocument(CellscopeError):
    """Per-line error rate requested for a document without source lines."""

    def __init__(self, total: int) -> None:
        super().__init__(f"document has no source lines ({total} findings)")
        self.total = total


# ───────────────────────── store ──────────────────────────


class StoreError(CellscopeError):
    """Base class for result store failures."""


class IOFailure(StoreError):
    def __init__(self, message: str, path: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


class StorageFull(IOFailure):
    """The store's filesystem ran out of space."""


class ForeignDocMissing(StoreError):
    """Cell or finding rows reference a document that was never written."""

    def __init__(self, doc_id: str) -> None:
        super().__init__(f"no document record for {doc_id}")
        self.doc_id = doc_id


class UnknownMetric(StoreError):
    def __init__(self, metric_name: str) -> None:
        super().__init__(f"unknown metric: {metric_name}")
        self.metric_name = metric_name


# ───────────────────────── stats ──────────────────────────


class StatsError(CellscopeError):
    """Base class for statistical input errors."""


class EmptySample(StatsError):
    pass


class InsufficientSample(StatsError):
    def __init__(self, size_a: int, size_b: int) -> None:
        super().__init__(
            f"Welch test needs at least 2 values per sample (got {size_a}, {size_b})"
        )
        self.size_a = size_a
        self.size_b = size_b


class DegenerateVariance(StatsError):
    """Both samples have zero variance."""

    def __init__(self, means_equal: bool) -> None:
        detail = "equal means" if means_equal else "different means"
        super().__init__(f"both samples have zero variance ({detail})")
        self.means_equal = means_equal


class EmptyCorpus(StatsError):
    pass


# ───────────────────────── cli / pipeline ─────────────────


class ConfigError(CellscopeError):
    """Invalid configuration value (usage error)."""


class NoInputs(CellscopeError):
    def __init__(self, missing: list[str]) -> None:
        super().__init__("input roots do not exist: " + ", ".join(missing))
        self.missing = missing


class StoreUnwritable(CellscopeError):
    def __init__(self, path: str, reason: str) -> None:
        super().__init__(f"cannot write store {path}: {reason}")
        self.path = path


class InsufficientCorpus(CellscopeError):
    def __init__(self, notebooks: int, scripts: int) -> None:
        super().__init__(
            "comparison needs at least 2 documents of each kind "
            f"(notebooks={notebooks}, scripts={scripts})"
        )
        self.notebooks = notebooks
        self.scripts = scripts
