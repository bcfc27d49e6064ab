"""
Readers for the two input formats.

Both start with a header line `taxa: a b c ...`. A splits file then
has one `<weight> : <labels of one side, comma separated>` line per
split; a matrix file has n rows of n entries. Numbers are decimals or
p/q rationals. `#` starts a comment.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple

from code.splitspan.errors import InputFormatError, SplitSpanError
from code.splitspan.metric import FiniteMetric
from code.splitspan.splits import GroundSet, Split, WeightedSplitSystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParsedInput:
    kind: str
    system: Optional[WeightedSplitSystem] = None
    metric: Optional[FiniteMetric] = None

    @property
    def ground(self) -> GroundSet:
        return self.system.ground if self.system is not None else self.metric.ground


def parse_number(token: str, line: Optional[int] = None) -> Fraction:
    try:
        value = Fraction(token.strip())
    except (ValueError, ZeroDivisionError):
        raise InputFormatError(f"not a decimal or p/q rational: {token.strip()!r}", line) from None
    return value


def _content_lines(text: str) -> List[Tuple[int, str]]:
    out = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((number, line))
    return out


def _header(lines: List[Tuple[int, str]]) -> Tuple[GroundSet, List[Tuple[int, str]]]:
    if not lines:
        raise InputFormatError("empty input; expected a 'taxa:' header", 1)
    number, first = lines[0]
    key, sep, rest = first.partition(":")
    if not sep or key.strip().lower() != "taxa":
        raise InputFormatError("first line must be 'taxa: <labels>'", number)
    labels = rest.split()
    try:
        ground = GroundSet(tuple(labels))
    except SplitSpanError as e:
        raise InputFormatError(str(e), number) from None
    return ground, lines[1:]


def detect_kind(text: str) -> str:
    """'splits' if the first body line has a colon, else 'matrix'."""
    _, body = _header(_content_lines(text))
    if not body or ":" in body[0][1]:
        return "splits"
    return "matrix"


def parse_splits(text: str) -> WeightedSplitSystem:
    ground, body = _header(_content_lines(text))
    pairs = []
    seen = {}
    for number, line in body:
        weight_text, sep, side_text = line.partition(":")
        if not sep:
            raise InputFormatError("expected '<weight> : <labels>'", number)
        weight = parse_number(weight_text, number)
        if weight <= 0:
            raise InputFormatError(f"split weight must be positive, got {weight}", number)
        labels = [label.strip() for label in side_text.split(",") if label.strip()]
        if not labels:
            raise InputFormatError("split side is empty", number)
        try:
            split = Split.from_labels(ground, labels)
        except SplitSpanError as e:
            raise InputFormatError(str(e), number) from None
        if split in seen:
            raise InputFormatError(f"duplicate of the split on line {seen[split]}", number)
        seen[split] = number
        pairs.append((split, weight))
    system = WeightedSplitSystem.from_pairs(ground, pairs)
    logger.debug(f"Parsed {len(system)} splits on {ground.n} taxa")
    return system


def parse_matrix(text: str) -> FiniteMetric:
    ground, body = _header(_content_lines(text))
    n = ground.n
    if len(body) != n:
        line = body[-1][0] if body else 1
        raise InputFormatError(f"expected {n} matrix rows, found {len(body)}", line)
    rows = []
    for number, line in body:
        tokens = line.split()
        if len(tokens) != n:
            raise InputFormatError(f"expected {n} entries, found {len(tokens)}", number)
        rows.append(tuple(parse_number(t, number) for t in tokens))
    metric = FiniteMetric(ground, tuple(rows))
    metric.check_triangle()
    return metric


def parse_text(text: str, kind: Optional[str] = None) -> ParsedInput:
    kind = kind or detect_kind(text)
    if kind == "splits":
        return ParsedInput("splits", system=parse_splits(text))
    if kind == "matrix":
        return ParsedInput("matrix", metric=parse_matrix(text))
    raise InputFormatError(f"unknown input kind {kind!r}; use 'matrix' or 'splits'")


def load(path: str, kind: Optional[str] = None) -> ParsedInput:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputFormatError(f"cannot read {path}: {e}") from None
    return parse_text(text, kind)
