"""
Finite metrics, split metrics and split decomposition.

decompose() recovers a weighted split system from a metric through
isolation indices computed over every bipartition of the ground set.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from code.splitspan.config import MAX_DECOMPOSE_TAXA
from code.splitspan.errors import CapacityError, MetricError
from code.splitspan.splits import GroundSet, Split, WeightedSplitSystem

logger = logging.getLogger(__name__)

Rows = Tuple[Tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class FiniteMetric:
    """
    Exact symmetric distance matrix with zero diagonal.

    Construction checks shape, diagonal, symmetry and sign. The triangle
    inequality is checked separately by check_triangle() because
    residual matrices share this type.
    """
    ground: GroundSet
    d: Rows

    def __post_init__(self):
        n = self.ground.n
        rows = tuple(tuple(Fraction(v) for v in row) for row in self.d)
        labels = self.ground.labels
        if len(rows) != n or any(len(row) != n for row in rows):
            raise MetricError(f"Distance matrix must be {n}x{n}")
        for x in range(n):
            if rows[x][x] != 0:
                raise MetricError(f"d({labels[x]},{labels[x]}) = {rows[x][x]} must be 0", (labels[x],))
            for y in range(x + 1, n):
                if rows[x][y] != rows[y][x]:
                    raise MetricError(
                        f"Matrix is not symmetric: d({labels[x]},{labels[y]}) = {rows[x][y]} "
                        f"but d({labels[y]},{labels[x]}) = {rows[y][x]}",
                        (labels[x], labels[y]),
                    )
                if rows[x][y] < 0:
                    raise MetricError(
                        f"Negative distance d({labels[x]},{labels[y]}) = {rows[x][y]}",
                        (labels[x], labels[y]),
                    )
        object.__setattr__(self, "d", rows)

    @classmethod
    def from_rows(cls, labels: Sequence[str], rows: Iterable[Iterable]) -> "FiniteMetric":
        return cls(GroundSet(tuple(labels)), tuple(tuple(row) for row in rows))

    @property
    def n(self) -> int:
        return self.ground.n

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.ground.labels

    def __call__(self, x: int, y: int) -> Fraction:
        return self.d[x][y]

    def row(self, x: int) -> Tuple[Fraction, ...]:
        return self.d[x]

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for row in self.d for v in row)

    @property
    def is_pseudometric(self) -> bool:
        """True when two distinct taxa are at distance zero."""
        return any(self.d[x][y] == 0 for x, y in itertools.combinations(range(self.n), 2))

    def find_triangle_violation(self) -> Optional[Tuple[int, int, int]]:
        """(x, y, z) with d(x,z) > d(x,y) + d(y,z), or None."""
        n = self.n
        for x, z in itertools.combinations(range(n), 2):
            for y in range(n):
                if y != x and y != z and self.d[x][z] > self.d[x][y] + self.d[y][z]:
                    return x, y, z
        return None

    def check_triangle(self) -> None:
        violation = self.find_triangle_violation()
        if violation is None:
            return
        x, y, z = (self.labels[i] for i in violation)
        raise MetricError(
            f"Triangle inequality fails: d({x},{z}) > d({x},{y}) + d({y},{z})", (x, y, z)
        )

    def __sub__(self, other: "FiniteMetric") -> Rows:
        return tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(self.d, other.d))


@dataclass(frozen=True)
class DecompositionResult:
    system: WeightedSplitSystem
    residual: FiniteMetric
    totally_split_decomposable: bool
    weakly_compatible: bool


def split_metric(s: Split) -> Rows:
    """The 0/1 matrix of δ_S."""
    return tuple(
        tuple(Fraction(int(s.separates(x, y))) for y in range(s.n))
        for x in range(s.n)
    )


def synthesize(sys: WeightedSplitSystem) -> FiniteMetric:
    """d = Σ α(S) δ_S. Pairs separated by no split end up at distance zero."""
    n = sys.n
    rows = [[Fraction(0)] * n for _ in range(n)]
    for split, weight in sys:
        side, other = sorted(split.side), sorted(split.complement)
        for x in side:
            for y in other:
                rows[x][y] += weight
                rows[y][x] += weight
    metric = FiniteMetric(sys.ground, tuple(tuple(row) for row in rows))
    if metric.is_pseudometric:
        logger.info("Synthesized matrix is only a pseudometric: some taxa are not separated")
    return metric


def isolation_index(d: FiniteMetric, s: Split) -> Fraction:
    """
    Isolation index of s in d.

    Minimum over a, a' on one side and b, b' on the other (equal
    elements allowed) of half of
    max(d(a,b)+d(a',b'), d(a,b')+d(a',b), d(a,a')+d(b,b')) - d(a,a') - d(b,b').
    """
    if s.n != d.n:
        raise MetricError(f"Split over {s.n} taxa used with a metric on {d.n} taxa")
    rows = d.d
    side = sorted(s.side)
    other = sorted(s.complement)
    best: Optional[Fraction] = None
    for a, a2 in itertools.combinations_with_replacement(side, 2):
        daa = rows[a][a2]
        for b, b2 in itertools.combinations_with_replacement(other, 2):
            dbb = rows[b][b2]
            value = max(rows[a][b] + rows[a2][b2], rows[a][b2] + rows[a2][b], daa + dbb) - daa - dbb
            if best is None or value < best:
                best = value
                if best == 0:
                    return Fraction(0)
    return best / 2


def _candidate_splits(n: int) -> List[Split]:
    # every bipartition, as the side avoiding taxon 0
    return [
        Split(frozenset(i + 1 for i in range(n - 1) if mask >> i & 1), n)
        for mask in range(1, 1 << (n - 1))
    ]


def decompose(d: FiniteMetric, max_taxa: int = MAX_DECOMPOSE_TAXA, workers: int = 1) -> DecompositionResult:
    """Split decomposition: every split with positive isolation index, plus the residual."""
    d.check_triangle()
    if d.n > max_taxa:
        raise CapacityError(
            f"decompose enumerates all bipartitions and is limited to {max_taxa} taxa, got {d.n}"
        )
    candidates = _candidate_splits(d.n)
    logger.debug(f"Computing isolation indices for {len(candidates)} candidate splits")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            indices = list(pool.map(lambda s: isolation_index(d, s), candidates))
    else:
        indices = [isolation_index(d, s) for s in candidates]

    pairs = [(s, alpha) for s, alpha in zip(candidates, indices) if alpha > 0]
    system = WeightedSplitSystem.from_pairs(d.ground, pairs)
    synthesized = synthesize(system)
    residual = FiniteMetric(d.ground, d - synthesized)
    decomposable = residual.is_zero
    weakly = system.weakly_compatible
    if decomposable and not weakly:
        logger.error("Zero residual but the recovered split system is not weakly compatible")
    logger.info(
        f"Decomposition finished: {len(system)} splits, "
        f"totally split-decomposable: {'yes' if decomposable else 'no'}"
    )
    return DecompositionResult(system, residual, decomposable, weakly)
