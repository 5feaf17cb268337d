"""Exception hierarchy shared across the package."""

from __future__ import annotations


class QdamrError(Exception):
    """Base class for every error raised by this package."""


class PenmanSyntaxError(QdamrError):
    """Malformed PENMAN text; carries the character offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class GraphError(QdamrError):
    """An operation received or would produce an invalid graph."""


class LinearizeError(QdamrError):
    """A symbol sequence cannot be interpreted as a graph."""


class UntypeableQuestionError(QdamrError):
    """The question graph has no single primary unknown to reason about."""


class UndecomposableError(QdamrError):
    """No secondary unknown candidate; the question is answered single-hop."""


class NoParallelStructureError(QdamrError):
    """No repeated path of the minimum length exists in the linearization."""


class SegmentationError(QdamrError):
    """Segmenting the graph would violate a sub-graph contract."""


class BackendError(QdamrError):
    """Base class for model-backend failures."""


class TransportError(BackendError):
    """HTTP-level failure. ``kind`` is one of timeout/connection/server/client."""

    def __init__(self, message: str, kind: str = "connection"):
        super().__init__(message)
        self.kind = kind


class ProtocolError(BackendError):
    """The backend answered but the response violates the wire contract."""


class FixtureMissError(BackendError):
    """No recorded fixture for a request; carries the request hash."""

    def __init__(self, key: str, request: dict):
        super().__init__(f"no fixture recorded for request {key}")
        self.key = key
        self.request = request


class FixtureFormatError(BackendError):
    """A fixture file is malformed."""


class PipelineStageError(QdamrError):
    """A pipeline stage failed; wraps the underlying error with its stage."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause


class OpEvaluationError(QdamrError):
    """A discrete operation could not parse its operand values."""


class UnsupportedComparisonError(QdamrError):
    """No keyword rule matches a comparison question."""


class SchemaError(QdamrError):
    """A dataset or trace file violates its schema."""
