import logging
from dataclasses import dataclass
from typing import Optional

from code.splitspan.errors import CapacityError

logger = logging.getLogger(__name__)

# Configuration constants
DEFAULT_ORACLE_CAP = 8
MAX_BUNEMAN_SPLITS = 24
MAX_DECOMPOSE_TAXA = 16

INPUT_KINDS = ("matrix", "splits")
OUTPUT_FORMATS = ("json", "dot", "text")
ORACLE_METHODS = ("walk", "basis")


@dataclass(frozen=True)
class Config:
    """Run configuration shared by the CLI, the API and the scripts."""
    input_path: Optional[str] = None
    input_kind: Optional[str] = None      # None means detect from the header
    output_path: Optional[str] = None     # None means stdout
    output_format: str = "text"
    oracle_cap: int = DEFAULT_ORACLE_CAP
    allow_large_oracle: bool = False
    oracle_method: str = "walk"
    max_splits: int = MAX_BUNEMAN_SPLITS
    max_decompose_taxa: int = MAX_DECOMPOSE_TAXA
    decimal_digits: Optional[int] = None
    workers: int = 1
    verbosity: int = 0

    def __post_init__(self):
        if self.input_kind is not None and self.input_kind not in INPUT_KINDS:
            raise ValueError(f"input_kind must be one of {INPUT_KINDS}, got {self.input_kind!r}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"output_format must be one of {OUTPUT_FORMATS}, got {self.output_format!r}")
        if self.oracle_cap < 2:
            raise ValueError(f"oracle_cap must be at least 2, got {self.oracle_cap}")
        if self.oracle_cap > DEFAULT_ORACLE_CAP and not self.allow_large_oracle:
            raise CapacityError(
                f"oracle_cap {self.oracle_cap} exceeds {DEFAULT_ORACLE_CAP}; "
                f"pass --force-oracle-cap to allow it"
            )
        if self.oracle_method not in ORACLE_METHODS:
            raise ValueError(f"oracle_method must be one of {ORACLE_METHODS}, got {self.oracle_method!r}")
        if self.max_splits < 1:
            raise ValueError(f"max_splits must be positive, got {self.max_splits}")
        if self.decimal_digits is not None and self.decimal_digits < 0:
            raise ValueError(f"decimal_digits must be non-negative, got {self.decimal_digits}")
        if self.workers < 1:
            raise ValueError(f"workers must be positive, got {self.workers}")

    @property
    def log_level(self) -> int:
        if self.verbosity >= 2:
            return logging.DEBUG
        if self.verbosity == 1:
            return logging.INFO
        return logging.WARNING
