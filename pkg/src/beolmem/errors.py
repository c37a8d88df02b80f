"""Exception types shared across the toolkit."""

from __future__ import annotations


class BeolmemError(Exception):
    """Base class for all toolkit errors."""


class InputDomainError(BeolmemError, ValueError):
    """Non-finite or out-of-domain numeric input."""


class CapabilityError(BeolmemError, ValueError):
    """Requested an operation a topology/port combination does not support."""


class ConstraintError(BeolmemError, ValueError):
    """A design violates a hard structural constraint (e.g. row limit)."""


class InfeasibleError(BeolmemError):
    """No design in the searched space satisfies the constraints.

    Carries the tally of binding constraints so callers can report why.
    """

    def __init__(self, message: str, binding: dict[str, int] | None = None):
        super().__init__(message)
        self.binding = dict(binding or {})


class StepSizeError(BeolmemError, RuntimeError):
    """Transient step moved state too far; retry with a smaller dt."""


class ConfigError(BeolmemError, ValueError):
    """Malformed config file or missing/ill-typed key."""


class TraceError(BeolmemError, ValueError):
    """Malformed trace line; message includes the line number."""


class ReportError(BeolmemError, ValueError):
    """A report was requested over missing or incomplete study results."""
