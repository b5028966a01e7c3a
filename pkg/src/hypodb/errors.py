"""Exception hierarchy shared by the engine, the CLI and the HTTP service.

Every domain error carries a stable ``code`` drawn from a fixed enumeration so
that the CLI can emit machine-readable payloads and the service can map errors
onto HTTP statuses without string matching.
"""

from __future__ import annotations

from typing import Any


class HypoDBError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str, **detail: Any):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def to_payload(self) -> dict:
        return {"code": self.code, "message": self.message, "detail": self.detail}


class ParseError(HypoDBError):
    """Structure document or expression rejected by the parser."""

    code = "parse_error"

    def __init__(self, message: str, line: int | None = None, column: int | None = None, **detail: Any):
        if line is not None:
            detail["line"] = line
        if column is not None:
            detail["column"] = column
        super().__init__(message, **detail)
        self.line = line
        self.column = column


class ValidationError(HypoDBError):
    code = "validation_error"


class UnknownIdError(HypoDBError):
    code = "unknown_id"


class DuplicateError(HypoDBError):
    """Re-insert of an existing trial, equation name or relation."""

    code = "duplicate"


class IncompleteStructureError(HypoDBError):
    """No total causal mapping exists: the model is over- or under-constrained."""

    code = "incomplete_structure"


class SizeGuardError(HypoDBError):
    """A brute-force oracle was invoked beyond its guarded size."""

    code = "size_guard"


class NoFdForAttributeError(HypoDBError):
    """Attribute folding requested for an attribute no fd determines."""

    code = "no_fd_for_attribute"


class NonDisjointGroupError(HypoDBError):
    """conf() hit a tuple group whose condition sets overlap as events.

    Exact confidence computation is only supported for the disjoint or
    identical condition sets that synthesis produces.
    """

    code = "non_disjoint_group"


class StoreError(HypoDBError):
    code = "store_error"


class ConditioningError(HypoDBError):
    code = "conditioning_error"
