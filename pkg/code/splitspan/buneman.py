"""
The Buneman complex of a weighted split system.

A point is stored as one rational per split: t_i = φ(A_i) for the
canonical side A_i, with φ(complement) = α_i/2 - t_i implied. Vertices
pick one side per split; cells are (base vertex, free splits) cubes.
"""
import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from code.splitspan.config import MAX_BUNEMAN_SPLITS
from code.splitspan.errors import AssemblyError, CapacityError, SplitSpanError
from code.splitspan.splits import ComponentClass, WeightedSplitSystem, classify_component

logger = logging.getLogger(__name__)

Taxon = Union[int, str]


def _taxon_index(sys: WeightedSplitSystem, x: Taxon) -> int:
    if isinstance(x, str):
        return sys.ground.index(x)
    if not 0 <= x < sys.n:
        raise SplitSpanError(f"Unknown taxon index {x}; ground set has {sys.n} taxa")
    return x


@dataclass(frozen=True, order=True)
class BunemanVertex:
    """choice[i] is True when the chosen side ψ(S_i) is the canonical side A_i."""
    choice: Tuple[bool, ...]

    def flip(self, i: int) -> "BunemanVertex":
        choice = list(self.choice)
        choice[i] = not choice[i]
        return BunemanVertex(tuple(choice))

    def with_choices(self, updates: Dict[int, bool]) -> "BunemanVertex":
        choice = list(self.choice)
        for i, value in updates.items():
            choice[i] = value
        return BunemanVertex(tuple(choice))

    def chosen_mask(self, sys: WeightedSplitSystem, i: int) -> int:
        split = sys.splits[i]
        return split.mask if self.choice[i] else split.complement_mask

    def is_valid(self, sys: WeightedSplitSystem) -> bool:
        masks = [self.chosen_mask(sys, i) for i in range(len(self.choice))]
        return all(a & b for a, b in itertools.combinations(masks, 2))

    def to_point(self, sys: WeightedSplitSystem) -> "BunemanPoint":
        return BunemanPoint(
            sys, tuple(Fraction(0) if c else w / 2 for c, w in zip(self.choice, sys.weights))
        )

    def label(self) -> str:
        return "".join("1" if c else "0" for c in self.choice)


@dataclass(frozen=True)
class BunemanPoint:
    """
    A point of the weight box H(S, α).

    values[i] is φ(A_i) and must lie in [0, α_i/2]; construction checks
    the box bounds only, is_valid() adds the Buneman support condition.
    """
    sys: WeightedSplitSystem = field(compare=False, repr=False)
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        values = tuple(Fraction(v) for v in self.values)
        if len(values) != len(self.sys):
            raise SplitSpanError(f"Point has {len(values)} values for {len(self.sys)} splits")
        for i, (t, w) in enumerate(zip(values, self.sys.weights)):
            if t < 0 or t > w / 2:
                raise SplitSpanError(f"Value {t} for split S{i} is outside [0, {w / 2}]")
        object.__setattr__(self, "values", values)

    def value(self, i: int, side: FrozenSet[int]) -> Fraction:
        """φ on one side of split i."""
        split = self.sys.splits[i]
        if side == split.side:
            return self.values[i]
        if side == split.complement:
            return self.sys.weights[i] / 2 - self.values[i]
        raise SplitSpanError(f"{sorted(side)} is not a side of S{i}")

    def side_values(self, i: int) -> Tuple[Fraction, Fraction]:
        return self.values[i], self.sys.weights[i] / 2 - self.values[i]

    def coordinates(self) -> Tuple[Fraction, ...]:
        """All of φ over U(S), canonical side then complement for each split."""
        return tuple(v for i in range(len(self.values)) for v in self.side_values(i))

    @property
    def free(self) -> FrozenSet[int]:
        """S(φ): splits with both sides in the support."""
        return frozenset(
            i for i, (t, w) in enumerate(zip(self.values, self.sys.weights)) if 0 < t < w / 2
        )

    def support_masks(self) -> List[Tuple[int, int]]:
        """(split index, side mask) for every side with positive value."""
        out = []
        for i, split in enumerate(self.sys.splits):
            on_side, on_complement = self.side_values(i)
            if on_side > 0:
                out.append((i, split.mask))
            if on_complement > 0:
                out.append((i, split.complement_mask))
        return out

    def is_valid(self) -> bool:
        """Buneman condition: two support sides covering X must be disjoint."""
        full = self.sys.ground.full_mask
        support = self.support_masks()
        for (i, p), (j, q) in itertools.combinations(support, 2):
            if i != j and p | q == full:
                return False
        return True

    def is_vertex(self) -> bool:
        return not self.free

    def as_vertex(self) -> BunemanVertex:
        if self.free:
            raise SplitSpanError("Point is not a vertex of the Buneman complex")
        return BunemanVertex(tuple(t == 0 for t in self.values))

    def rounded_base(self) -> BunemanVertex:
        """Vertex agreeing on fixed splits, with free splits set to their complement side."""
        free = self.free
        return BunemanVertex(tuple(t == 0 and i not in free for i, t in enumerate(self.values)))

    def combine(self, other: "BunemanPoint", weight: Fraction) -> "BunemanPoint":
        """(1 - weight)·self + weight·other."""
        weight = Fraction(weight)
        return BunemanPoint(
            self.sys, tuple((1 - weight) * a + weight * b for a, b in zip(self.values, other.values))
        )

    def midpoint(self, other: "BunemanPoint") -> "BunemanPoint":
        return self.combine(other, Fraction(1, 2))


PointLike = Union[BunemanPoint, BunemanVertex]


def as_point(sys: WeightedSplitSystem, p: PointLike) -> BunemanPoint:
    return p.to_point(sys) if isinstance(p, BunemanVertex) else p


@dataclass(frozen=True)
class BunemanCell:
    """Cube spanned at `base` by flipping the splits in `free`; base has False on free splits."""
    base: BunemanVertex
    free: FrozenSet[int]

    @property
    def dim(self) -> int:
        return len(self.free)

    @property
    def sort_key(self) -> Tuple:
        return self.dim, self.base.choice, tuple(sorted(self.free))

    def vertices(self) -> List[BunemanVertex]:
        free = sorted(self.free)
        return sorted(
            self.base.with_choices(dict(zip(free, flips)))
            for flips in itertools.product((False, True), repeat=len(free))
        )

    def facets(self) -> List["BunemanCell"]:
        out = []
        for i in sorted(self.free):
            rest = self.free - {i}
            out.append(BunemanCell(self.base, rest))
            out.append(BunemanCell(self.base.with_choices({i: True}), rest))
        return out

    def generator(self, sys: WeightedSplitSystem) -> BunemanPoint:
        """Interior point: α/4 on free splits, base values elsewhere."""
        values = []
        for i, (c, w) in enumerate(zip(self.base.choice, sys.weights)):
            if i in self.free:
                values.append(w / 4)
            else:
                values.append(Fraction(0) if c else w / 2)
        return BunemanPoint(sys, tuple(values))

    def contains_vertex(self, v: BunemanVertex) -> bool:
        return all(a == b for i, (a, b) in enumerate(zip(self.base.choice, v.choice)) if i not in self.free)

    def contains_point(self, p: BunemanPoint) -> bool:
        for i, t in enumerate(p.values):
            if i in self.free:
                continue
            expected = Fraction(0) if self.base.choice[i] else p.sys.weights[i] / 2
            if t != expected:
                return False
        return True


def taxon_vertex(sys: WeightedSplitSystem, x: Taxon) -> BunemanVertex:
    x = _taxon_index(sys, x)
    return BunemanVertex(tuple(split.contains(x) for split in sys.splits))


def taxon_point(sys: WeightedSplitSystem, x: Taxon) -> BunemanPoint:
    """φ_x: α/2 on every side not containing x, 0 on the sides containing it."""
    return taxon_vertex(sys, x).to_point(sys)


def _side_masks(sys: WeightedSplitSystem) -> List[Tuple[int, int]]:
    # index 0 is the complement side (choice False), index 1 the canonical side
    return [(s.complement_mask, s.mask) for s in sys.splits]


def _flip_is_valid(masks: List[Tuple[int, int]], choice: Sequence[bool], i: int) -> bool:
    new = masks[i][not choice[i]]
    return all(new & masks[j][choice[j]] for j in range(len(choice)) if j != i)


def enumerate_vertices(sys: WeightedSplitSystem, method: str = "bfs",
                       max_splits: int = MAX_BUNEMAN_SPLITS) -> List[BunemanVertex]:
    """
    All side choices with pairwise intersecting sides, sorted.

    method="bfs" expands single-split flips from the taxon vertices; the
    Buneman graph is connected so this reaches every vertex.
    method="exhaustive" filters all 2^|S| choices.
    """
    m = len(sys)
    if m > max_splits:
        raise CapacityError(
            f"{m} splits exceed the Buneman vertex enumeration bound of {max_splits}; raise --max-splits to allow it"
        )
    masks = _side_masks(sys)
    if method == "exhaustive":
        found = [
            BunemanVertex(choice)
            for choice in itertools.product((False, True), repeat=m)
            if all(masks[i][choice[i]] & masks[j][choice[j]] for i, j in itertools.combinations(range(m), 2))
        ]
        return sorted(found)
    if method != "bfs":
        raise ValueError(f"Unknown vertex enumeration method: {method!r}")

    seeds = {taxon_vertex(sys, x) for x in range(sys.n)}
    seen = set(seeds)
    queue = deque(sorted(seeds))
    while queue:
        v = queue.popleft()
        for i in range(m):
            if not _flip_is_valid(masks, v.choice, i):
                continue
            w = v.flip(i)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    logger.debug(f"Buneman BFS found {len(seen)} vertices for {m} splits")
    return sorted(seen)


@dataclass(frozen=True)
class BunemanBlock:
    index: int
    component: FrozenSet[int]
    component_class: ComponentClass
    vertices: Tuple[BunemanVertex, ...]
    cells: Tuple[BunemanCell, ...]
    cut_vertices: Tuple[BunemanVertex, ...]

    @cached_property
    def _vertex_set(self) -> FrozenSet[BunemanVertex]:
        return frozenset(self.vertices)

    def contains_vertex(self, v: BunemanVertex) -> bool:
        return v in self._vertex_set

    def contains_point(self, p: PointLike) -> bool:
        """Geometric membership: the carrier cell of p belongs to this block."""
        if isinstance(p, BunemanVertex):
            return self.contains_vertex(p)
        if not p.is_valid():
            return False
        free = p.free
        if not free:
            return self.contains_vertex(p.as_vertex())
        return free <= self.component

    def cell_counts(self) -> List[int]:
        return _counts(self.cells)


def _counts(cells: Iterable[BunemanCell]) -> List[int]:
    counts: List[int] = []
    for cell in cells:
        while len(counts) <= cell.dim:
            counts.append(0)
        counts[cell.dim] += 1
    return counts


@dataclass(frozen=True)
class BunemanComplex:
    sys: WeightedSplitSystem
    vertices: Tuple[BunemanVertex, ...]
    cells: Tuple[BunemanCell, ...]
    taxon_vertices: Tuple[BunemanVertex, ...]

    @cached_property
    def vertex_ids(self) -> Dict[BunemanVertex, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def cell_ids(self) -> Dict[BunemanCell, int]:
        return {c: i for i, c in enumerate(self.cells)}

    @property
    def edges(self) -> List[Tuple[int, int, int]]:
        """(vertex id, vertex id, split index) for every 1-cell."""
        out = []
        for cell in self.cells:
            if cell.dim != 1:
                continue
            (i,) = cell.free
            u, v = cell.vertices()
            out.append((self.vertex_ids[u], self.vertex_ids[v], i))
        return out

    @cached_property
    def graph(self) -> nx.Graph:
        """The Buneman graph with split labels on its edges."""
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        for u, v, i in self.edges:
            graph.add_edge(self.vertices[u], self.vertices[v], split=i)
        return graph

    def cell_counts(self) -> List[int]:
        return _counts(self.cells)

    def facets(self, cell: BunemanCell) -> List[int]:
        return sorted(self.cell_ids[f] for f in cell.facets())

    @cached_property
    def maximal_cells(self) -> Tuple[BunemanCell, ...]:
        covered = set()
        for cell in self.cells:
            covered.update(cell.facets())
        return tuple(c for c in self.cells if c not in covered)

    @cached_property
    def blocks(self) -> Tuple[BunemanBlock, ...]:
        return tuple(blocks(self))

    @cached_property
    def cut_vertices(self) -> FrozenSet[BunemanVertex]:
        return frozenset(nx.articulation_points(self.graph))

    def block_of_component(self, component: Iterable[int]) -> BunemanBlock:
        component = frozenset(component)
        for block in self.blocks:
            if block.component == component:
                return block
        raise SplitSpanError(f"No block for component {sorted(component)}")

    def carrier(self, p: BunemanPoint) -> BunemanCell:
        """The smallest cell containing p."""
        return BunemanCell(p.rounded_base(), p.free)


def _closed(masks: List[Tuple[int, int]], base: Sequence[bool], free: Sequence[int]) -> bool:
    # every free split must cut the chosen side of every fixed split
    fixed = [j for j in range(len(base)) if j not in free]
    for i in free:
        low, high = masks[i]
        for j in fixed:
            chosen = masks[j][base[j]]
            if not (low & chosen and high & chosen):
                return False
    return True


def enumerate_cells(sys: WeightedSplitSystem, vertices: Optional[Sequence[BunemanVertex]] = None) -> BunemanComplex:
    """Every cube cell of the Buneman complex, generated once from its base vertex."""
    if vertices is None:
        vertices = enumerate_vertices(sys)
    masks = _side_masks(sys)
    incompatibility = sys.incompatibility.to_networkx()
    cliques = [()] + [tuple(sorted(c)) for c in nx.enumerate_all_cliques(incompatibility)]

    cells = []
    for v in vertices:
        for free in cliques:
            if any(v.choice[i] for i in free):
                continue
            if _closed(masks, v.choice, free):
                cells.append(BunemanCell(v, frozenset(free)))
    cells.sort(key=lambda c: c.sort_key)
    taxa = tuple(taxon_vertex(sys, x) for x in range(sys.n))
    complex_ = BunemanComplex(sys, tuple(vertices), tuple(cells), taxa)
    logger.info(f"Buneman complex: {len(vertices)} vertices, cell counts {complex_.cell_counts()}")
    return complex_


def build_complex(sys: WeightedSplitSystem, max_splits: int = MAX_BUNEMAN_SPLITS) -> BunemanComplex:
    return enumerate_cells(sys, enumerate_vertices(sys, max_splits=max_splits))


def blocks(complex_: BunemanComplex) -> List[BunemanBlock]:
    """
    One block per component of the incompatibility graph.

    Blocks are the biconnected components of the Buneman graph; each
    must carry exactly the edge labels of one component.
    """
    sys = complex_.sys
    graph = complex_.graph
    by_labels: Dict[FrozenSet[int], FrozenSet[BunemanVertex]] = {}
    for edges in nx.biconnected_component_edges(graph):
        edges = list(edges)
        labels = frozenset(graph.edges[u, v]["split"] for u, v in edges)
        nodes = frozenset(itertools.chain.from_iterable(edges))
        if labels in by_labels:
            logger.error(f"Two Buneman blocks carry the same splits {sorted(labels)}")
            raise AssemblyError(f"two blocks of the Buneman graph carry splits {sorted(labels)}")
        by_labels[labels] = nodes

    components = sys.incompatibility.components
    if set(by_labels) != set(components):
        logger.error(f"Blocks {sorted(map(sorted, by_labels))} do not match components {sorted(map(sorted, components))}")
        raise AssemblyError("Buneman graph blocks do not match the incompatibility graph components")

    cut = complex_.cut_vertices
    out = []
    for index, component in enumerate(components):
        nodes = by_labels[component]
        cells = [c for c in complex_.cells if (c.dim == 0 and c.base in nodes) or (c.dim > 0 and c.free <= component)]
        out.append(BunemanBlock(
            index=index,
            component=component,
            component_class=classify_component(sys, component),
            vertices=tuple(sorted(nodes)),
            cells=tuple(cells),
            cut_vertices=tuple(sorted(nodes & cut)),
        ))
    logger.debug(f"Buneman complex has {len(out)} blocks and {len(cut)} cut vertices")
    return out


def delta(p1: PointLike, p2: PointLike, sys: Optional[WeightedSplitSystem] = None) -> FrozenSet[int]:
    """Splits on which the two points differ."""
    if sys is None:
        sys = p1.sys if isinstance(p1, BunemanPoint) else p2.sys
    a, b = as_point(sys, p1), as_point(sys, p2)
    return frozenset(i for i, (s, t) in enumerate(zip(a.values, b.values)) if s != t)


def same_block(p1: PointLike, p2: PointLike, component: Iterable[int],
               sys: Optional[WeightedSplitSystem] = None) -> bool:
    """True iff every split separating the two points lies in the component."""
    return delta(p1, p2, sys) <= frozenset(component)


def gate_vertex(sys: WeightedSplitSystem, cell: BunemanCell, x: Taxon) -> BunemanVertex:
    x = _taxon_index(sys, x)
    return cell.base.with_choices({i: sys.splits[i].contains(x) for i in cell.free})


def gate(sys: WeightedSplitSystem, cell: BunemanCell, x: Taxon) -> BunemanPoint:
    """Nearest point of the cell to φ_x: φ_x's sides on free splits, the base elsewhere."""
    return gate_vertex(sys, cell, x).to_point(sys)
