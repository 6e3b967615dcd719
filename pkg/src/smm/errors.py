"""Exception types shared across the toolkit.

Every failure carries a stable machine-readable ``code`` (mirroring diagnostic
rule codes) so the CLI and the HTTP service can surface it uniformly.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from smm.model import Diagnostic


class SmmError(Exception):
    """Base error with a machine-readable code and optional diagnostics."""

    def __init__(self, code: str, message: str, diagnostics: Sequence["Diagnostic"] = ()):
        super().__init__(message)
        self.code = code
        self.message = message
        self.diagnostics = tuple(diagnostics)

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


class ParseError(SmmError):
    """Raised when a .smmdl/.smma text cannot be parsed.

    Carries every independent error found in one pass, each with a source span.
    """

    def __init__(self, diagnostics: Sequence["Diagnostic"], message: str = "parse failed"):
        super().__init__("PARSE_FAILED", message, diagnostics)


class EvaluationError(SmmError):
    """Raised when evaluation preconditions fail (invalid model or assessment)."""

    def __init__(self, diagnostics: Sequence["Diagnostic"]):
        super().__init__("VALIDATION_FAILED", "model or assessment has blocking errors", diagnostics)


class NotFoundError(SmmError):
    def __init__(self, message: str):
        super().__init__("NOT_FOUND", message)


class ConflictError(SmmError):
    def __init__(self, message: str):
        super().__init__("CONFLICT", message)


class ValidationFailedError(SmmError):
    def __init__(self, diagnostics: Sequence["Diagnostic"], message: str = "validation failed"):
        super().__init__("VALIDATION_FAILED", message, diagnostics)
