"""Exception types shared by every module of the toolkit."""

from __future__ import annotations


class JLangError(Exception):
    """Base class for all toolkit errors."""


class JParseError(JLangError, ValueError):
    """Raised on malformed expression text."""

    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        self.position = position
        self.expected = expected
        detail = f"{message} at position {position}"
        if expected:
            detail += f" (expected {', '.join(expected)})"
        super().__init__(detail)


class ValidationError(JLangError, ValueError):
    """Raised when a structure violates its well-formedness rules."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class NormalizationError(JLangError, ValueError):
    pass


class ResourceLimitError(JLangError, RuntimeError):
    """A brute-force search exceeded its configured cap."""


class NetShapeError(JLangError, ValueError):
    """A net does not have the shape an operation requires."""


class SpaceBoundViolation(JLangError, RuntimeError):
    """A counter machine exceeded the linear-space bound."""


class IncompleteAnalysisError(JLangError, RuntimeError):
    """Extraction could not close its analysis within the configured limits."""

    def __init__(self, message: str, partial):
        self.partial = partial
        super().__init__(message)
