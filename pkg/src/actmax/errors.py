"""Shared exception types."""

from __future__ import annotations


class ActivityMaxError(Exception):
    """Base class for errors raised by this package."""


class EdgeListError(ActivityMaxError, ValueError):
    """Malformed or empty edge-list input. Carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ModelViolationError(ActivityMaxError, ValueError):
    """Diffusion parameters violate a model precondition (e.g. LT in-arc mass > 1)."""


class EnumerationLimitError(ActivityMaxError, ValueError):
    """Instance is too large for exhaustive outcome enumeration."""


class DegenerateWeightsError(ActivityMaxError, ValueError):
    """All sampling weights are zero (no activity mass / no node weight)."""
