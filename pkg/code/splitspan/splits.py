"""
Ground sets, splits and weighted split systems.

Splits are stored canonically as the side that does not contain the
taxon with index 0. All set algebra is exact and done on frozensets or
on the equivalent integer bit masks.
"""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from code.splitspan.errors import ClassificationError, SplitSpanError, WeakCompatibilityError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroundSet:
    """Ordered, duplicate-free list of taxon labels."""
    labels: Tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 2:
            raise SplitSpanError(f"A ground set needs at least 2 taxa, got {len(labels)}")
        seen = set()
        for label in labels:
            if label in seen:
                raise SplitSpanError(f"Duplicate taxon label: {label!r}")
            seen.add(label)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def _positions(self) -> Dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def index(self, label: str) -> int:
        try:
            return self._positions[str(label)]
        except KeyError:
            raise SplitSpanError(f"Unknown taxon: {label!r}") from None

    def label(self, i: int) -> str:
        return self.labels[i]

    def render(self, indices: Iterable[int]) -> str:
        return "{" + ",".join(self.labels[i] for i in sorted(indices)) + "}"


@dataclass(frozen=True)
class Split:
    """A bipartition of {0..n-1}; `side` is the part without taxon 0."""
    side: FrozenSet[int]
    n: int

    def __post_init__(self):
        side = frozenset(self.side)
        if any(i < 0 or i >= self.n for i in side):
            raise SplitSpanError(f"Split side {sorted(side)} is not a subset of 0..{self.n - 1}")
        if 0 in side:
            side = frozenset(range(self.n)) - side
        if not side:
            raise SplitSpanError("A split needs two nonempty sides")
        object.__setattr__(self, "side", side)

    @classmethod
    def from_labels(cls, ground: GroundSet, labels: Iterable[str]) -> "Split":
        return cls(frozenset(ground.index(label) for label in labels), ground.n)

    @cached_property
    def complement(self) -> FrozenSet[int]:
        return frozenset(range(self.n)) - self.side

    @cached_property
    def mask(self) -> int:
        return sum(1 << i for i in self.side)

    @property
    def complement_mask(self) -> int:
        return ((1 << self.n) - 1) & ~self.mask

    @property
    def sort_key(self) -> Tuple[int, ...]:
        return tuple(sorted(self.side))

    @property
    def is_trivial(self) -> bool:
        return len(self.side) == 1 or len(self.side) == self.n - 1

    def contains(self, x: int) -> bool:
        """True if x lies on the canonical side."""
        return x in self.side

    def side_of(self, x: int) -> FrozenSet[int]:
        """S(x): the side containing x."""
        return self.side if x in self.side else self.complement

    def far_side_of(self, x: int) -> FrozenSet[int]:
        """The complement of S(x)."""
        return self.complement if x in self.side else self.side

    def far_mask_of(self, x: int) -> int:
        return self.complement_mask if x in self.side else self.mask

    def separates(self, x: int, y: int) -> bool:
        return (x in self.side) != (y in self.side)

    def render(self, ground: GroundSet) -> str:
        return f"{ground.render(self.side)} | {ground.render(self.complement)}"


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise SplitSpanError(f"Refusing float weight {value!r}; use a Fraction, int or decimal string")
    return Fraction(value)


@dataclass(frozen=True)
class WeightedSplitSystem:
    """Splits with positive rational weights, kept in canonical order."""
    ground: GroundSet
    splits: Tuple[Split, ...]
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        splits = tuple(self.splits)
        weights = tuple(_as_fraction(w) for w in self.weights)
        if len(splits) != len(weights):
            raise SplitSpanError(f"{len(splits)} splits but {len(weights)} weights")
        seen = set()
        for split, weight in zip(splits, weights):
            if split.n != self.ground.n:
                raise SplitSpanError(
                    f"Split {sorted(split.side)} is over {split.n} taxa, ground set has {self.ground.n}"
                )
            if split in seen:
                raise SplitSpanError(f"Duplicate split {split.render(self.ground)}")
            seen.add(split)
            if weight <= 0:
                raise SplitSpanError(f"Split {split.render(self.ground)} has non-positive weight {weight}")
        order = sorted(range(len(splits)), key=lambda i: splits[i].sort_key)
        object.__setattr__(self, "splits", tuple(splits[i] for i in order))
        object.__setattr__(self, "weights", tuple(weights[i] for i in order))

    @classmethod
    def from_pairs(cls, ground: GroundSet, pairs: Iterable[Tuple[Split, object]]) -> "WeightedSplitSystem":
        pairs = list(pairs)
        return cls(ground, tuple(s for s, _ in pairs), tuple(w for _, w in pairs))

    @classmethod
    def from_labelled(cls, labels: Sequence[str], sides: Iterable[Tuple[Iterable[str], object]]) -> "WeightedSplitSystem":
        """Build from taxon labels and (one side as labels, weight) pairs."""
        ground = GroundSet(tuple(labels))
        return cls.from_pairs(ground, ((Split.from_labels(ground, side), w) for side, w in sides))

    def __len__(self) -> int:
        return len(self.splits)

    def __iter__(self) -> Iterator[Tuple[Split, Fraction]]:
        return iter(zip(self.splits, self.weights))

    @property
    def n(self) -> int:
        return self.ground.n

    def weight(self, i: int) -> Fraction:
        return self.weights[i]

    @cached_property
    def _index(self) -> Dict[Split, int]:
        return {s: i for i, s in enumerate(self.splits)}

    def index_of(self, split: Split) -> int:
        try:
            return self._index[split]
        except KeyError:
            raise SplitSpanError(f"Split {split.render(self.ground)} is not in the system") from None

    def describe(self, i: int) -> str:
        return f"S{i} = {self.splits[i].render(self.ground)}"

    def restrict(self, indices: Iterable[int]) -> "WeightedSplitSystem":
        """Subsystem on the same ground set."""
        keep = sorted(set(indices))
        return WeightedSplitSystem(
            self.ground, tuple(self.splits[i] for i in keep), tuple(self.weights[i] for i in keep)
        )

    @cached_property
    def membership(self) -> Tuple[Tuple[bool, ...], ...]:
        """membership[i][x] is True when taxon x is on split i's canonical side."""
        return tuple(tuple(s.contains(x) for x in range(self.n)) for s in self.splits)

    @cached_property
    def weakly_compatible(self) -> bool:
        return is_weakly_compatible(self)

    @cached_property
    def incompatibility(self) -> "IncompatibilityGraph":
        return incompatibility_graph(self)


def is_compatible(s1: Split, s2: Split) -> bool:
    """True iff some side of s1 united with some side of s2 is the whole ground set."""
    if s1.n != s2.n:
        raise SplitSpanError(f"Splits are over different ground sets ({s1.n} vs {s2.n} taxa)")
    if s1 == s2:
        return True
    # A ∪ A' = X exactly when the complements are disjoint.
    a, b = s1.mask, s1.complement_mask
    c, d = s2.mask, s2.complement_mask
    return not (a & c) or not (a & d) or not (b & c) or not (b & d)


# --- weak compatibility -----------------------------------------------------

@dataclass(frozen=True)
class WeakCompatibilityViolation:
    """Three splits and four taxa realizing the forbidden pattern."""
    splits: Tuple[int, int, int]
    taxa: Tuple[int, int, int, int]

    def describe(self, sys: WeightedSplitSystem) -> str:
        split_text = ", ".join(sys.describe(i) for i in self.splits)
        taxa_text = ", ".join(sys.ground.label(x) for x in self.taxa)
        return f"splits [{split_text}] and taxa ({taxa_text}) violate weak compatibility"

    def to_error(self, sys: WeightedSplitSystem) -> WeakCompatibilityError:
        return WeakCompatibilityError(
            self.describe(sys),
            splits=self.splits,
            taxa=tuple(sys.ground.label(x) for x in self.taxa),
        )


def find_weak_compatibility_violation(sys: WeightedSplitSystem) -> Optional[WeakCompatibilityViolation]:
    """
    Direct scan for three splits S1,S2,S3 and taxa x0..x3 with
    S_j(x_i) = S_j(x_0) exactly when i = j.

    Given the triple and x0 the three witnesses are independent, so each
    is searched separately.
    """
    rows = sys.membership
    n = sys.n
    for triple in itertools.combinations(range(len(sys)), 3):
        members = [rows[i] for i in triple]
        for x0 in range(n):
            witnesses = []
            for pos in range(3):
                found = None
                for x in range(n):
                    if all((members[q][x] == members[q][x0]) == (q == pos) for q in range(3)):
                        found = x
                        break
                if found is None:
                    break
                witnesses.append(found)
            else:
                return WeakCompatibilityViolation(triple, (x0, *witnesses))
    return None


def _is_weakly_compatible_triples(sys: WeightedSplitSystem) -> bool:
    splits = sys.splits
    for i, j, k in itertools.combinations(range(len(splits)), 3):
        for x in range(sys.n):
            a = splits[i].far_mask_of(x)
            b = splits[j].far_mask_of(x)
            c = splits[k].far_mask_of(x)
            if a & b & c not in (a & b, b & c, a & c):
                return False
    return True


def is_weakly_compatible(sys: WeightedSplitSystem, method: str = "triple") -> bool:
    """
    Weak compatibility test.

    method="triple" uses the far-side triple intersection characterization
    (the default); method="quadruple" scans for a forbidden quadruple.
    """
    if method == "triple":
        return _is_weakly_compatible_triples(sys)
    if method == "quadruple":
        return find_weak_compatibility_violation(sys) is None
    raise ValueError(f"Unknown weak compatibility method: {method!r}")


def check_weakly_compatible(sys: WeightedSplitSystem) -> None:
    """Raise WeakCompatibilityError naming a violating triple and quadruple."""
    if sys.weakly_compatible:
        return
    violation = find_weak_compatibility_violation(sys)
    if violation is None:
        # the two tests are equivalent; reaching here is a bug
        raise WeakCompatibilityError("split system is not weakly compatible")
    error = violation.to_error(sys)
    logger.debug(f"Weak compatibility violation: {error}")
    raise error


# --- incompatibility graph and classification ---------------------------------

@dataclass(frozen=True)
class IncompatibilityGraph:
    nodes: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    components: Tuple[FrozenSet[int], ...]

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.nodes)
        graph.add_edges_from(self.edges)
        return graph

    def component_of(self, i: int) -> FrozenSet[int]:
        for component in self.components:
            if i in component:
                return component
        raise SplitSpanError(f"Split index {i} is not a node of the graph")


def incompatibility_graph(sys: WeightedSplitSystem) -> IncompatibilityGraph:
    graph = nx.Graph()
    graph.add_nodes_from(range(len(sys)))
    for i, j in itertools.combinations(range(len(sys)), 2):
        if not is_compatible(sys.splits[i], sys.splits[j]):
            graph.add_edge(i, j)
    components = sorted((frozenset(c) for c in nx.connected_components(graph)), key=min)
    edges = tuple(sorted((min(u, v), max(u, v)) for u, v in graph.edges()))
    logger.debug(f"Incompatibility graph: {len(sys)} splits, {len(edges)} edges, {len(components)} components")
    return IncompatibilityGraph(tuple(range(len(sys))), edges, tuple(components))


class ComponentKind(str, Enum):
    SINGLETON = "singleton"
    STRICTLY_CIRCULAR = "strictly_circular"
    OCTAHEDRAL = "octahedral"
    CONSISTENT = "consistent"


@dataclass(frozen=True)
class ComponentClass:
    """
    Shape of a connected component of the incompatibility graph.

    For circular and octahedral components `splits` is the relabeled
    order S_1..S_k and `parts` the cyclic partition X_1..X_2k (X_1..X_6
    for octahedral, with S_4 the alternating split). A singleton has the
    two sides of its split as parts. Consistent components carry no
    partition.
    """
    kind: ComponentKind
    splits: Tuple[int, ...]
    parts: Tuple[FrozenSet[int], ...] = ()

    @property
    def is_octahedral(self) -> bool:
        return self.kind is ComponentKind.OCTAHEDRAL

    @property
    def members(self) -> FrozenSet[int]:
        return frozenset(self.splits)

    def describe(self) -> str:
        if self.kind is ComponentKind.STRICTLY_CIRCULAR:
            return f"strictly circular (k={len(self.splits)})"
        return self.kind.value


def _refinement(sys: WeightedSplitSystem, members: Sequence[int]) -> List[FrozenSet[int]]:
    """Classes of taxa separated by no split in `members`, ordered by smallest taxon."""
    classes: Dict[Tuple[bool, ...], List[int]] = {}
    for x in range(sys.n):
        key = tuple(sys.membership[i][x] for i in members)
        classes.setdefault(key, []).append(x)
    return sorted((frozenset(c) for c in classes.values()), key=min)


def _pattern(sys: WeightedSplitSystem, members: Sequence[int], part: FrozenSet[int]) -> Tuple[bool, ...]:
    x = min(part)
    return tuple(sys.membership[i][x] for i in members)


def _arc_start(positions: FrozenSet[int], size: int, length: int) -> Optional[int]:
    """Start of `positions` as a cyclic interval of `length` in Z/size, else None."""
    if len(positions) != length:
        return None
    starts = [p for p in positions if (p - 1) % size not in positions]
    if len(starts) != 1:
        return None
    start = starts[0]
    if {(start + step) % size for step in range(length)} != positions:
        return None
    return start


def _match_circular(sys: WeightedSplitSystem, members: Sequence[int],
                    parts: Sequence[FrozenSet[int]]) -> Optional[Tuple[Tuple[int, ...], Tuple[FrozenSet[int], ...]]]:
    """
    Anchor-and-extend search for a cyclic order X_1..X_2k in which every
    split in `members` is k consecutive parts versus the rest.
    """
    k = len(members)
    size = 2 * k
    if len(parts) != size:
        return None
    patterns = [_pattern(sys, members, part) for part in parts]
    # cyclically adjacent parts differ in exactly one split
    adjacency = {
        p: [q for q in range(size) if q != p and sum(a != b for a, b in zip(patterns[p], patterns[q])) == 1]
        for p in range(size)
    }
    if any(len(neighbours) != 2 for neighbours in adjacency.values()):
        return None

    for first in sorted(adjacency[0]):
        order = [0, first]
        while len(order) < size:
            prev, cur = order[-2], order[-1]
            nxt = next(q for q in adjacency[cur] if q != prev)
            if nxt in order:
                break
            order.append(nxt)
        if len(order) != size or order[0] not in adjacency[order[-1]]:
            continue

        offsets = {}
        for m in members:
            positions = frozenset(pos for pos, p in enumerate(order) if min(parts[p]) in sys.splits[m].side)
            start = _arc_start(positions, size, k)
            if start is None:
                break
            offsets[m] = start % k
        else:
            if sorted(offsets.values()) != list(range(k)):
                continue
            relabeled = tuple(sorted(members, key=lambda m: offsets[m]))
            return relabeled, tuple(parts[p] for p in order)
    return None


def _match_octahedral(sys: WeightedSplitSystem, members: Sequence[int],
                      parts: Sequence[FrozenSet[int]]) -> Optional[Tuple[Tuple[int, ...], Tuple[FrozenSet[int], ...]]]:
    """Try each split as the alternating S_4 with the other three strictly circular."""
    if len(members) != 4 or len(parts) != 6:
        return None
    for alternating in members:
        rest = [m for m in members if m != alternating]
        match = _match_circular(sys, rest, parts)
        if match is None:
            continue
        relabeled, ordered_parts = match
        side = sys.splits[alternating].side
        positions = {pos for pos, part in enumerate(ordered_parts) if min(part) in side}
        if positions in ({0, 2, 4}, {1, 3, 5}):
            return relabeled + (alternating,), ordered_parts
    return None


def classify_component(sys: WeightedSplitSystem, component: Iterable[int]) -> ComponentClass:
    """Classify a connected component of I(sys) as singleton, strictly circular, octahedral or consistent."""
    members = sorted(set(component))
    if not members:
        raise SplitSpanError("Cannot classify an empty component")
    check_weakly_compatible(sys)

    if len(members) == 1:
        split = sys.splits[members[0]]
        return ComponentClass(ComponentKind.SINGLETON, (members[0],), (split.complement, split.side))

    pairwise = all(
        not is_compatible(sys.splits[a], sys.splits[b])
        for a, b in itertools.combinations(members, 2)
    )
    if not pairwise:
        return ComponentClass(ComponentKind.CONSISTENT, tuple(members))

    parts = _refinement(sys, members)
    circular = _match_circular(sys, members, parts)
    if circular is not None:
        return ComponentClass(ComponentKind.STRICTLY_CIRCULAR, *circular)
    octahedral = _match_octahedral(sys, members, parts)
    if octahedral is not None:
        return ComponentClass(ComponentKind.OCTAHEDRAL, *octahedral)

    logger.error(f"Pairwise incompatible component {members} with {len(parts)} parts matched no pattern")
    raise ClassificationError(
        f"pairwise incompatible splits {members} are neither strictly circular nor octahedral"
    )


def classify_components(sys: WeightedSplitSystem) -> List[ComponentClass]:
    """Classification of every component of I(sys), in component order."""
    return [classify_component(sys, component) for component in sys.incompatibility.components]


def oct_subsystems(sys: WeightedSplitSystem) -> List[FrozenSet[int]]:
    """Components of I(sys) that are octahedral split systems."""
    check_weakly_compatible(sys)
    return [c.members for c in classify_components(sys) if c.is_octahedral]
