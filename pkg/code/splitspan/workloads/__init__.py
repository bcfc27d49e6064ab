"""
Instance generation for the split-span pipelines: fixed fixtures and
seeded random split systems.
"""

from .generators import SplitSystemGenerator

__all__ = ['SplitSystemGenerator']
