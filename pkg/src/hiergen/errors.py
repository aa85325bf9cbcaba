"""Exception types shared across the package."""

from __future__ import annotations


class HiergenError(Exception):
    """Base class for all package errors."""


class ParameterError(HiergenError, ValueError):
    """A parameter violates its contract.

    ``fields`` names the offending parameter(s).
    """

    def __init__(self, message: str, fields: tuple[str, ...] = ()):
        super().__init__(message)
        self.fields = tuple(fields)


class DepthLimitError(HiergenError, RuntimeError):
    """Routing tried to descend past the configured max depth."""


class DimensionMismatchError(HiergenError, ValueError):
    """Vectors that must share a dimension do not."""


class ParseError(HiergenError, ValueError):
    """A file could not be parsed; message carries line/field diagnostics."""


class ConsistencyError(HiergenError, ValueError):
    """Serialized artifacts are mutually inconsistent."""
