"""
Exception hierarchy for split-span.

Everything derives from ValueError so callers that only catch the
builtin still see bad input as bad input.
"""
from typing import Optional, Sequence, Tuple


class SplitSpanError(ValueError):
    """Base class for all domain errors."""


class InputFormatError(SplitSpanError):
    """A splits or matrix file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MetricError(SplitSpanError):
    """A distance matrix is not a (pseudo)metric."""

    def __init__(self, message: str, labels: Sequence[str] = ()):
        self.labels = tuple(labels)
        super().__init__(message)


class WeakCompatibilityError(SplitSpanError):
    """A split system violates weak compatibility."""

    def __init__(self, message: str,
                 splits: Tuple[int, int, int] = (),
                 taxa: Tuple[str, str, str, str] = ()):
        self.splits = tuple(splits)
        self.taxa = tuple(taxa)
        super().__init__(message)


class CapacityError(SplitSpanError):
    """A configured size bound was exceeded."""


class ClassificationError(SplitSpanError):
    """A pairwise incompatible component matched neither known pattern."""


class AssemblyError(SplitSpanError):
    """A structural invariant failed while building a complex."""
