"""
The map κ from the Buneman complex into function space, and tight-span
membership tests for functions X -> Q.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Optional, Sequence, Tuple, Union

from code.splitspan.buneman import BunemanPoint, BunemanVertex, PointLike, as_point
from code.splitspan.errors import AssemblyError, SplitSpanError
from code.splitspan.linalg import rank
from code.splitspan.metric import FiniteMetric, synthesize
from code.splitspan.splits import ComponentKind, GroundSet, WeightedSplitSystem, check_weakly_compatible, classify_component

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TightPoint:
    """A function on the taxa with the pairs {x, y} where f(x) + f(y) = d(x, y)."""
    ground: GroundSet
    f: Tuple[Fraction, ...]
    tight_pairs: FrozenSet[Tuple[int, int]] = field(default=frozenset(), compare=False)

    @classmethod
    def from_values(cls, d: FiniteMetric, values: Sequence) -> "TightPoint":
        f = tuple(Fraction(v) for v in values)
        if len(f) != d.n:
            raise SplitSpanError(f"Function has {len(f)} values for {d.n} taxa")
        tight = frozenset(
            (x, y) for x, y in itertools.combinations_with_replacement(range(d.n), 2)
            if f[x] + f[y] == d(x, y)
        )
        return cls(d.ground, f, tight)

    def as_dict(self) -> Dict[str, Fraction]:
        return dict(zip(self.ground.labels, self.f))


Function = Union[TightPoint, Sequence]


def _values(f: Function) -> Tuple[Fraction, ...]:
    return f.f if isinstance(f, TightPoint) else tuple(Fraction(v) for v in f)


@lru_cache(maxsize=64)
def metric_of(sys: WeightedSplitSystem) -> FiniteMetric:
    """d_{S,α}, cached per system."""
    return synthesize(sys)


def d1(p1: PointLike, p2: PointLike, sys: Optional[WeightedSplitSystem] = None) -> Fraction:
    """ℓ¹ distance over all sides; both sides of a split move by the same amount."""
    if sys is None:
        sys = p1.sys if isinstance(p1, BunemanPoint) else p2.sys
    a, b = as_point(sys, p1), as_point(sys, p2)
    return sum((2 * abs(s - t) for s, t in zip(a.values, b.values)), Fraction(0))


def _kappa_values(sys: WeightedSplitSystem, p: BunemanPoint) -> Tuple[Fraction, ...]:
    membership = sys.membership
    out = []
    for x in range(sys.n):
        total = Fraction(0)
        for i, (t, w) in enumerate(zip(p.values, sys.weights)):
            total += 2 * t if membership[i][x] else w - 2 * t
        out.append(total)
    return tuple(out)


def kappa(p: PointLike, sys: Optional[WeightedSplitSystem] = None) -> TightPoint:
    """x ↦ d1(p, φ_x)."""
    if sys is None:
        if not isinstance(p, BunemanPoint):
            raise SplitSpanError("kappa of a bare vertex needs the split system")
        sys = p.sys
    check_weakly_compatible(sys)
    point = as_point(sys, p)
    return TightPoint.from_values(metric_of(sys), _kappa_values(sys, point))


def kappa_vertex(sys: WeightedSplitSystem, v: BunemanVertex) -> Tuple[Fraction, ...]:
    """Coordinates of κ(v): the total weight of splits whose chosen side misses x."""
    out = []
    for x in range(sys.n):
        out.append(sum(
            (w for i, w in enumerate(sys.weights) if v.choice[i] != sys.membership[i][x]),
            Fraction(0),
        ))
    return tuple(out)


def h_x(d: FiniteMetric, x: int) -> TightPoint:
    return TightPoint.from_values(d, d.row(x))


def d_inf(f: Function, g: Function) -> Fraction:
    return max(abs(a - b) for a, b in zip(_values(f), _values(g)))


def in_polyhedron(f: Function, d: FiniteMetric) -> bool:
    values = _values(f)
    return all(
        values[x] + values[y] >= d(x, y)
        for x, y in itertools.combinations_with_replacement(range(d.n), 2)
    )


def is_tight_point(f: Function, d: FiniteMetric) -> bool:
    """f is in P(d) and f(x) = max_y d(x,y) - f(y) for every x."""
    values = _values(f)
    if len(values) != d.n or not in_polyhedron(values, d):
        return False
    return all(
        values[x] == max(d(x, y) - values[y] for y in range(d.n))
        for x in range(d.n)
    )


def octahedral_witness(p1: PointLike, p2: PointLike,
                       sys: Optional[WeightedSplitSystem] = None) -> FrozenSet[int]:
    """
    For distinct points with the same κ-image, the free splits of their
    midpoint. These always form an octahedral component; anything else
    raises AssemblyError.
    """
    if sys is None:
        sys = p1.sys if isinstance(p1, BunemanPoint) else p2.sys
    a, b = as_point(sys, p1), as_point(sys, p2)
    if a == b:
        raise SplitSpanError("octahedral_witness needs two distinct points")
    if kappa(a) != kappa(b):
        raise SplitSpanError("octahedral_witness needs two points with the same image")
    support = a.midpoint(b).free
    if support not in sys.incompatibility.components:
        raise AssemblyError(f"collision support {sorted(support)} is not a component")
    if classify_component(sys, support).kind is not ComponentKind.OCTAHEDRAL:
        raise AssemblyError(f"collision support {sorted(support)} is not octahedral")
    logger.debug(f"kappa collision explained by octahedral component {sorted(support)}")
    return support


def is_extremal_at(d: FiniteMetric, m: Function, delta: Sequence, face: Sequence[Function]) -> bool:
    """
    Check the extremal-subset property at m in direction delta.

    Holds unless m + delta and m - delta both lie in P(d) while delta is
    not parallel to the affine span of `face`.
    """
    centre = _values(m)
    step = tuple(Fraction(v) for v in delta)
    plus = tuple(c + s for c, s in zip(centre, step))
    minus = tuple(c - s for c, s in zip(centre, step))
    if not (in_polyhedron(plus, d) and in_polyhedron(minus, d)):
        return True
    points = [_values(p) for p in face]
    if not points:
        return not any(step)
    origin = points[0]
    directions = [[a - b for a, b in zip(p, origin)] for p in points[1:]]
    directions = [v for v in directions if any(v)]
    before = rank(directions, d.n) if directions else 0
    after = rank(directions + [list(step)], d.n)
    return before == after
