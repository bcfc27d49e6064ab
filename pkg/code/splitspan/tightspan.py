"""
Assembly of the tight span of d_{S,α} as a polytopal complex.

Each block of the Buneman complex is pushed through κ. Blocks of
non-octahedral components are copied cell by cell; the 4-cube of an
octahedral component collapses onto a rhombic dodecahedron whose
combinatorics come from a fixed template. Blocks are glued where
their vertex images coincide, which must be exactly at the images of
Buneman cut vertices.
"""
import itertools
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from code.splitspan.buneman import (
    BunemanBlock, BunemanCell, BunemanComplex, BunemanVertex, build_complex, gate_vertex,
)
from code.splitspan.config import MAX_BUNEMAN_SPLITS
from code.splitspan.errors import AssemblyError, SplitSpanError
from code.splitspan.kappa import TightPoint, kappa_vertex, metric_of
from code.splitspan.linalg import nullspace
from code.splitspan.metric import FiniteMetric
from code.splitspan.splits import ComponentClass, ComponentKind, WeightedSplitSystem, check_weakly_compatible

logger = logging.getLogger(__name__)

Coords = Tuple[Fraction, ...]
Pattern = Tuple[bool, ...]


class BlockShape(str, Enum):
    CONSISTENT = "consistent"
    RHOMBIC_DODECAHEDRON = "rhombic_dodecahedron"


@dataclass(frozen=True)
class TightSpanCell:
    id: int
    dim: int
    vertices: FrozenSet[int]
    faces: FrozenSet[int]
    block: int


@dataclass(frozen=True)
class TightSpanBlock:
    id: int
    component: FrozenSet[int]
    component_class: ComponentClass
    shape: BlockShape
    vertices: Tuple[int, ...]
    cells: Tuple[int, ...]
    cut_vertices: Tuple[int, ...]
    interior_points: Tuple[Coords, ...] = ()

    @property
    def label(self) -> str:
        if self.shape is BlockShape.RHOMBIC_DODECAHEDRON:
            return "rhombic dodecahedron"
        if self.component_class.kind in (ComponentKind.SINGLETON, ComponentKind.STRICTLY_CIRCULAR):
            return f"{len(self.component)}-cube"
        return "consistent block"


@dataclass(frozen=True)
class PolytopalComplex:
    """
    The assembled tight span.

    `vertices` are sorted by coordinates and a vertex id is its position.
    `source` and `vertex_of` tie the result back to the Buneman complex;
    `cell_map` holds the cell isomorphism of every non-octahedral block.
    """
    metric: FiniteMetric
    vertices: Tuple[TightPoint, ...]
    cells: Tuple[TightSpanCell, ...]
    blocks: Tuple[TightSpanBlock, ...]
    source: Optional[BunemanComplex] = field(default=None, compare=False, repr=False)
    vertex_of: Dict[BunemanVertex, int] = field(default_factory=dict, compare=False, repr=False)
    cell_map: Dict[BunemanCell, int] = field(default_factory=dict, compare=False, repr=False)

    @property
    def ground(self):
        return self.metric.ground

    def cell(self, cell_id: int) -> TightSpanCell:
        for cell in self.cells:
            if cell.id == cell_id:
                return cell
        raise SplitSpanError(f"No cell with id {cell_id}")

    def cells_of_dim(self, dim: int) -> List[TightSpanCell]:
        return [c for c in self.cells if c.dim == dim]

    def edges(self) -> List[Tuple[int, int]]:
        return sorted(tuple(sorted(c.vertices)) for c in self.cells if c.dim == 1)

    def skeleton(self) -> nx.Graph:
        """The 1-skeleton on vertex ids, labelled by coordinates."""
        graph = nx.Graph()
        for i, v in enumerate(self.vertices):
            graph.add_node(i, label="(" + ",".join(str(c) for c in v.f) + ")")
        graph.add_edges_from(self.edges())
        return graph

    def cell_counts(self) -> List[int]:
        return _dim_counts(c.dim for c in self.cells)

    def block_cell_counts(self, block: TightSpanBlock) -> List[int]:
        by_id = {c.id: c for c in self.cells}
        return _dim_counts(by_id[i].dim for i in block.cells)

    def coordinates(self) -> List[Coords]:
        return [v.f for v in self.vertices]


def _dim_counts(dims) -> List[int]:
    counts: List[int] = []
    for dim in dims:
        while len(counts) <= dim:
            counts.append(0)
        counts[dim] += 1
    return counts


@dataclass(frozen=True)
class RhombicDodecahedronTemplate:
    """
    The 4-cube {0,1}^4 with two antipodal corners removed, keeping the
    faces of dimension at most 2 that avoid them, plus one 3-cell.

    Slots are side patterns relative to the four octahedral splits.
    """
    excluded: Tuple[Pattern, Pattern]
    slots: Tuple[Pattern, ...]
    edges: Tuple[Tuple[int, int], ...]
    faces: Tuple[Tuple[int, ...], ...]

    @classmethod
    def around(cls, corner: Pattern) -> "RhombicDodecahedronTemplate":
        corner = tuple(corner)
        antipode = tuple(not c for c in corner)
        excluded = (corner, antipode)
        slots = tuple(p for p in itertools.product((False, True), repeat=4) if p not in excluded)
        index = {p: i for i, p in enumerate(slots)}
        edges = tuple(
            (i, j) for i, j in itertools.combinations(range(len(slots)), 2)
            if sum(a != b for a, b in zip(slots[i], slots[j])) == 1
        )
        faces = []
        for axes in itertools.combinations(range(4), 2):
            others = [k for k in range(4) if k not in axes]
            for fixed in itertools.product((False, True), repeat=2):
                square = []
                for flips in itertools.product((False, True), repeat=2):
                    p = [False] * 4
                    for k, v in zip(others, fixed):
                        p[k] = v
                    for k, v in zip(axes, flips):
                        p[k] = v
                    square.append(tuple(p))
                if not any(p in excluded for p in square):
                    faces.append(tuple(sorted(index[p] for p in square)))
        template = cls(excluded, slots, edges, tuple(sorted(faces)))
        if (len(slots), len(edges), len(faces)) != (14, 24, 12):
            raise AssemblyError("rhombic dodecahedron template has the wrong face counts")
        return template

    def degree(self, slot: int) -> int:
        return sum(1 for e in self.edges if slot in e)

    @property
    def gate_slots(self) -> Tuple[int, ...]:
        return tuple(i for i in range(len(self.slots)) if self.degree(i) == 4)


@dataclass(frozen=True)
class OctahedralBlock:
    """A rhombic dodecahedron instantiated on one octahedral 4-cube."""
    component_class: ComponentClass
    cube: BunemanCell
    template: RhombicDodecahedronTemplate
    slots: Tuple[BunemanVertex, ...]
    images: Tuple[Coords, ...]
    interior: Tuple[BunemanVertex, BunemanVertex]
    interior_images: Tuple[Coords, Coords]
    gates: Tuple[BunemanVertex, ...]


def _pattern_vertex(cube: BunemanCell, order: Sequence[int], pattern: Pattern) -> BunemanVertex:
    return cube.base.with_choices(dict(zip(order, pattern)))


def _kernel_direction(sys: WeightedSplitSystem, order: Sequence[int]) -> List[Fraction]:
    # columns of κ's linear part in the free coordinates: +2 on the canonical side, -2 off it
    rows = [[Fraction(2 if sys.membership[i][x] else -2) for i in order] for x in range(sys.n)]
    kernel = nullspace(rows, len(order))
    if len(kernel) != 1:
        raise AssemblyError(f"octahedral cube has a {len(kernel)}-dimensional kernel, expected 1")
    return kernel[0]


def _feasible(pattern: Pattern, direction: Sequence[Fraction]) -> bool:
    # t may grow only from 0 (canonical side chosen) and shrink only from α/2
    return all((k <= 0 or p) and (k >= 0 or not p) for p, k in zip(pattern, direction))


def octahedral_block(sys: WeightedSplitSystem, block: BunemanBlock) -> OctahedralBlock:
    """Instantiate the template on an octahedral block of the Buneman complex."""
    klass = block.component_class
    if klass.kind is not ComponentKind.OCTAHEDRAL:
        raise SplitSpanError(f"component {sorted(block.component)} is {klass.kind.value}, not octahedral")
    cubes = [c for c in block.cells if c.free == block.component]
    if len(cubes) != 1:
        raise AssemblyError(f"octahedral block has {len(cubes)} maximal 4-cubes")
    cube = cubes[0]
    order = klass.splits

    k = _kernel_direction(sys, order)
    minus_k = [-v for v in k]
    collapsing = [p for p in itertools.product((False, True), repeat=4) if _feasible(p, k) or _feasible(p, minus_k)]
    if len(collapsing) != 2 or collapsing[0] != tuple(not c for c in collapsing[1]):
        logger.error(f"Kernel {k} gives non-extreme corners {collapsing}")
        raise AssemblyError("octahedral cube does not have exactly two antipodal non-extreme corners")
    template = RhombicDodecahedronTemplate.around(collapsing[0])

    slots = tuple(_pattern_vertex(cube, order, p) for p in template.slots)
    images = tuple(kappa_vertex(sys, v) for v in slots)
    if len(set(images)) != len(images):
        raise AssemblyError("two extreme corners of an octahedral cube share an image")
    interior = tuple(_pattern_vertex(cube, order, p) for p in template.excluded)
    interior_images = tuple(kappa_vertex(sys, v) for v in interior)

    gates = []
    for part in klass.parts:
        g = gate_vertex(sys, cube, min(part))
        gates.append(g)
    gate_set = set(gates)
    if len(gate_set) != 6 or gate_set != {slots[i] for i in template.gate_slots}:
        logger.error("Gate vertices do not land on the degree-4 template slots")
        raise AssemblyError("gates of an octahedral cube are not the degree-4 vertices")

    logger.debug(f"Octahedral block {sorted(block.component)}: interior corners {[v.label() for v in interior]}")
    return OctahedralBlock(klass, cube, template, slots, images, interior, interior_images, tuple(gates))


@dataclass
class _Piece:
    """Cells of one block, keyed by vertex coordinates before global ids exist."""
    block: BunemanBlock
    shape: BlockShape
    vertex_images: Dict[BunemanVertex, Coords]
    cells: List[Tuple[int, FrozenSet[Coords], Optional[BunemanCell]]]
    interior_points: Tuple[Coords, ...] = ()


def _consistent_piece(sys: WeightedSplitSystem, block: BunemanBlock) -> _Piece:
    images = {v: kappa_vertex(sys, v) for v in block.vertices}
    if len(set(images.values())) != len(images):
        logger.error(f"kappa is not injective on block {sorted(block.component)}")
        raise AssemblyError(f"kappa identifies vertices of the non-octahedral block {sorted(block.component)}")
    cells = [(c.dim, frozenset(images[v] for v in c.vertices()), c) for c in block.cells]
    return _Piece(block, BlockShape.CONSISTENT, images, cells)


def _octahedral_piece(sys: WeightedSplitSystem, block: BunemanBlock) -> _Piece:
    octa = octahedral_block(sys, block)
    images = dict(zip(octa.slots, octa.images))
    cells: List[Tuple[int, FrozenSet[Coords], Optional[BunemanCell]]] = []
    cells.extend((0, frozenset([image]), None) for image in octa.images)
    cells.extend((1, frozenset(octa.images[i] for i in edge), None) for edge in octa.template.edges)
    cells.extend((2, frozenset(octa.images[i] for i in face), None) for face in octa.template.faces)
    cells.append((3, frozenset(octa.images), None))
    interior = tuple(sorted(set(octa.interior_images)))
    return _Piece(block, BlockShape.RHOMBIC_DODECAHEDRON, images, cells, interior)


def assemble(sys: WeightedSplitSystem, complex_: Optional[BunemanComplex] = None,
             max_splits: int = MAX_BUNEMAN_SPLITS) -> PolytopalComplex:
    """Build the tight span of d_{S,α} block by block from the Buneman complex."""
    if len(sys) == 0:
        raise SplitSpanError("cannot assemble the tight span of an empty split system")
    check_weakly_compatible(sys)
    if complex_ is None:
        complex_ = build_complex(sys, max_splits=max_splits)
    d = metric_of(sys)

    pieces = []
    for block in complex_.blocks:
        if block.component_class.kind is ComponentKind.OCTAHEDRAL:
            pieces.append(_octahedral_piece(sys, block))
        else:
            pieces.append(_consistent_piece(sys, block))

    # global vertex ids in coordinate order
    all_coords = sorted({c for piece in pieces for c in piece.vertex_images.values()})
    vertex_id = {c: i for i, c in enumerate(all_coords)}
    vertices = tuple(TightPoint.from_values(d, c) for c in all_coords)

    owners: Dict[int, List[int]] = {}
    for piece in pieces:
        for c in set(piece.vertex_images.values()):
            owners.setdefault(vertex_id[c], []).append(piece.block.index)
    shared = {v for v, blocks_ in owners.items() if len(blocks_) > 1}
    cut_images = {vertex_id.get(kappa_vertex(sys, v)) for v in complex_.cut_vertices}
    if shared != cut_images:
        logger.error(f"Shared vertices {sorted(shared)} differ from cut vertex images {sorted(cut_images)}")
        raise AssemblyError("blocks are glued somewhere other than at the images of cut vertices")

    # one 0-cell per vertex, owned by the first block that has it
    raw = []
    for v, blocks_ in owners.items():
        raw.append((0, frozenset([v]), min(blocks_), None))
    for piece in pieces:
        for dim, coords, source in piece.cells:
            if dim == 0:
                if source is not None:
                    raw.append((0, frozenset([vertex_id[next(iter(coords))]]), None, source))
                continue
            raw.append((dim, frozenset(vertex_id[c] for c in coords), piece.block.index, source))

    keyed: Dict[Tuple[int, FrozenSet[int]], int] = {}
    ordered = sorted(
        {(dim, verts, blk) for dim, verts, blk, _ in raw if blk is not None},
        key=lambda t: (t[0], sorted(t[1]), t[2]),
    )
    for i, (dim, verts, blk) in enumerate(ordered):
        keyed[(dim, verts)] = i

    by_vertex: Dict[int, List[int]] = {}
    for (dim, verts), i in keyed.items():
        for v in verts:
            by_vertex.setdefault(v, []).append(i)
    cells = []
    for i, (dim, verts, blk) in enumerate(ordered):
        faces = set()
        if dim > 0:
            for v in verts:
                for j in by_vertex[v]:
                    fdim, fverts, _ = ordered[j]
                    if fdim == dim - 1 and fverts <= verts:
                        faces.add(j)
        cells.append(TightSpanCell(i, dim, verts, frozenset(faces), blk))

    cell_map = {}
    for dim, verts, _, source in raw:
        if source is not None:
            cell_map[source] = keyed[(dim, verts)]

    vertex_of = {}
    for piece in pieces:
        for v, c in piece.vertex_images.items():
            vertex_of[v] = vertex_id[c]

    ts_blocks = []
    for piece in pieces:
        b = piece.block
        block_vertices = tuple(sorted({vertex_id[c] for c in piece.vertex_images.values()}))
        members = set(block_vertices)
        block_cells = tuple(
            c.id for c in cells
            if (c.dim == 0 and next(iter(c.vertices)) in members) or (c.dim > 0 and c.block == b.index)
        )
        ts_blocks.append(TightSpanBlock(
            id=b.index,
            component=b.component,
            component_class=b.component_class,
            shape=piece.shape,
            vertices=block_vertices,
            cells=block_cells,
            cut_vertices=tuple(sorted(members & shared)),
            interior_points=piece.interior_points,
        ))

    result = PolytopalComplex(d, vertices, tuple(cells), tuple(ts_blocks), complex_, vertex_of, cell_map)
    logger.info(
        f"Tight span assembled: {len(vertices)} vertices, {len(ts_blocks)} blocks, "
        f"cell counts {result.cell_counts()}"
    )
    return result


@dataclass(frozen=True)
class BlockCorrespondence:
    buneman: BunemanBlock
    tight: TightSpanBlock
    cells: Dict[BunemanCell, int]


def block_map(complex_: PolytopalComplex) -> List[BlockCorrespondence]:
    """
    The block bijection between the Buneman complex and the tight span,
    with the cell isomorphism for every non-octahedral block.
    """
    if complex_.source is None:
        raise SplitSpanError("block_map needs a complex produced by assemble()")
    out = []
    for bblock, tblock in zip(complex_.source.blocks, complex_.blocks):
        if bblock.component != tblock.component:
            raise AssemblyError("block order of the assembled complex differs from its source")
        if tblock.shape is BlockShape.CONSISTENT:
            cells = {c: complex_.cell_map[c] for c in bblock.cells}
        else:
            cells = {}
        out.append(BlockCorrespondence(bblock, tblock, cells))
    return out


def drop_cell(complex_: PolytopalComplex, cell_id: int) -> PolytopalComplex:
    """A copy of the complex with one cell removed. Ids of other cells are kept."""
    complex_.cell(cell_id)
    cells = tuple(
        replace(c, faces=c.faces - {cell_id}) for c in complex_.cells if c.id != cell_id
    )
    blocks_ = tuple(replace(b, cells=tuple(i for i in b.cells if i != cell_id)) for b in complex_.blocks)
    logger.warning(f"Dropped cell {cell_id} from the tight span complex")
    return replace(complex_, cells=cells, blocks=blocks_)
