"""Exception types shared across the mining pipelines and the task service."""

from __future__ import annotations

from typing import Any, Optional


class SalesMinerError(Exception):
    """Base class for all library errors."""


class IngestError(SalesMinerError):
    """A chatlog CSV failed validation.

    ``row`` is the 1-based CSV record number; the header is record 1, so the
    first data record is row 2.
    """

    def __init__(self, message: str, row: Optional[int] = None):
        super().__init__(message)
        self.row = row

    def to_doc(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"kind": type(self).__name__, "message": str(self)}
        if self.row is not None:
            doc["row"] = self.row
        for attr in ("column", "value", "dialog_id", "index"):
            if getattr(self, attr, None) is not None:
                doc[attr] = getattr(self, attr)
        return doc


class MissingColumn(IngestError):
    def __init__(self, column: str):
        super().__init__(f"required column {column!r} is missing", row=1)
        self.column = column


class BadSpeaker(IngestError):
    def __init__(self, value: str, row: int):
        super().__init__(f"unrecognized speaker {value!r}", row=row)
        self.value = value


class EmptyText(IngestError):
    def __init__(self, row: int):
        super().__init__("text is empty after trimming", row=row)


class NonUtf8(IngestError):
    def __init__(self, cause: str = ""):
        msg = "input is not valid UTF-8"
        super().__init__(f"{msg}: {cause}" if cause else msg)


class DuplicateTurnIndex(IngestError):
    def __init__(self, dialog_id: str, index: int, row: int):
        super().__init__(
            f"dialog {dialog_id!r} has duplicate turn_index {index}", row=row
        )
        self.dialog_id = dialog_id
        self.index = index


class BadTurnIndex(IngestError):
    def __init__(self, value: str, row: int):
        super().__init__(f"turn_index {value!r} is not a non-negative integer", row=row)
        self.value = value


class BadTimestamp(IngestError):
    def __init__(self, value: str, row: int):
        super().__init__(f"timestamp {value!r} is not ISO-8601", row=row)
        self.value = value


class RemoteUnavailable(SalesMinerError):
    """The remote model service could not be reached or answered garbage."""

    def __init__(self, url: str, cause: str, context: Optional[str] = None):
        detail = f"remote scorer at {url} unavailable: {cause}"
        if context:
            detail = f"{detail} (while scoring {context})"
        super().__init__(detail)
        self.url = url
        self.cause = cause
        self.context = context


class EmptyCandidates(SalesMinerError):
    """Answer scoring was asked to rank an empty candidate list."""


class BadK(SalesMinerError):
    """Requested cluster count is outside [1, n_points]."""


class DimensionMismatch(SalesMinerError):
    """Vectors passed to clustering do not share one dimension."""


class EmptyQuery(SalesMinerError):
    """Search query is empty after normalization."""


class RuleConfigError(SalesMinerError):
    """An SOP rule file failed validation."""


class ConfigError(SalesMinerError):
    """A service/CLI configuration file failed validation."""
