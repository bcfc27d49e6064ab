"""
split-span: exact tight spans of totally split-decomposable metrics.

The pipeline goes metric -> weighted split system -> Buneman complex ->
tight span, with a brute-force polyhedral oracle to check the result.
"""
from code.splitspan.errors import (
    AssemblyError,
    CapacityError,
    ClassificationError,
    InputFormatError,
    MetricError,
    SplitSpanError,
    WeakCompatibilityError,
)

__all__ = [
    "AssemblyError",
    "CapacityError",
    "ClassificationError",
    "InputFormatError",
    "MetricError",
    "SplitSpanError",
    "WeakCompatibilityError",
]
