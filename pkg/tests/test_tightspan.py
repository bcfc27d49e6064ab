import itertools
from fractions import Fraction

import pytest

from code.splitspan.buneman import build_complex
from code.splitspan.errors import SplitSpanError, WeakCompatibilityError
from code.splitspan.formats.exporters import tightspan_summary
from code.splitspan.kappa import d_inf, is_tight_point, kappa_vertex, metric_of
from code.splitspan.splits import GroundSet, Split, WeightedSplitSystem
from code.splitspan.tightspan import (
    BlockShape,
    RhombicDodecahedronTemplate,
    assemble,
    block_map,
    drop_cell,
    octahedral_block,
)
from code.splitspan.workloads import SplitSystemGenerator


@pytest.fixture
def rd(octahedral):
    return assemble(octahedral)


# --- template ---

def test_template_face_counts():
    template = RhombicDodecahedronTemplate.around((False,) * 4)
    assert len(template.slots) == 14
    assert len(template.edges) == 24
    assert len(template.faces) == 12
    degrees = sorted(template.degree(i) for i in range(14))
    assert degrees == [3] * 8 + [4] * 6
    assert len(template.gate_slots) == 6


def test_template_faces_are_rhombi():
    template = RhombicDodecahedronTemplate.around((True, False, True, False))
    edges = set(template.edges)
    for face in template.faces:
        assert len(face) == 4
        assert sum(1 for e in itertools.combinations(face, 2) if e in edges) == 4


# --- octahedral blocks ---

def test_octahedral_block_gates(octahedral):
    (block,) = build_complex(octahedral).blocks
    octa = octahedral_block(octahedral, block)
    d = metric_of(octahedral)
    gate_images = {kappa_vertex(octahedral, g) for g in octa.gates}
    assert gate_images == {d.row(x) for x in range(6)}


def test_gate_images_are_at_metric_distance(octahedral):
    (block,) = build_complex(octahedral).blocks
    octa = octahedral_block(octahedral, block)
    d = metric_of(octahedral)
    klass = octa.component_class
    for (gi, pi), (gj, pj) in itertools.combinations(zip(octa.gates, klass.parts), 2):
        x, y = min(pi), min(pj)
        assert d_inf(kappa_vertex(octahedral, gi), kappa_vertex(octahedral, gj)) == d(x, y)


def test_octahedral_block_interior_corners_are_antipodal(octahedral):
    (block,) = build_complex(octahedral).blocks
    octa = octahedral_block(octahedral, block)
    u, w = octa.interior
    assert all(a != b for a, b in zip(u.choice, w.choice))
    assert octa.interior_images[0] == octa.interior_images[1] == (Fraction(2),) * 6


def test_octahedral_block_needs_octahedral_component(circular3):
    (block,) = build_complex(circular3).blocks
    with pytest.raises(SplitSpanError, match="not octahedral"):
        octahedral_block(circular3, block)


# --- assemble ---

def test_octahedral_assembles_to_rhombic_dodecahedron(rd):
    (block,) = rd.blocks
    assert block.shape is BlockShape.RHOMBIC_DODECAHEDRON
    assert rd.cell_counts() == [14, 24, 12, 1]
    assert rd.block_cell_counts(block) == [14, 24, 12, 1]
    assert block.interior_points == ((Fraction(2),) * 6,)
    assert tightspan_summary(rd).splitlines()[0] == "1 block: rhombic dodecahedron (14V/24E/12F)"


def test_unequal_weights_separate_interior_points():
    sys = SplitSystemGenerator.octahedral([1, 2, 3, 4])
    complex_ = assemble(sys)
    (block,) = complex_.blocks
    assert complex_.cell_counts() == [14, 24, 12, 1]
    p, q = block.interior_points
    assert p != q
    assert all(a + b == 10 for a, b in zip(p, q))


@pytest.mark.parametrize("m", [2, 3])
def test_circular_assembles_to_cube(m):
    complex_ = assemble(SplitSystemGenerator.circular(m))
    (block,) = complex_.blocks
    assert block.shape is BlockShape.CONSISTENT
    assert block.label == f"{m}-cube"
    assert len(complex_.vertices) == 2 ** m
    assert len(complex_.edges()) == m * 2 ** (m - 1)


@pytest.mark.parametrize("fixture, counts", [("pentagon", [16, 20, 5]), ("hexagon", [32, 48, 18, 1])])
def test_consistent_component_assembles_cell_by_cell(fixture, counts, request):
    sys = request.getfixturevalue(fixture)
    complex_ = assemble(sys)
    assert complex_.cell_counts() == build_complex(sys).cell_counts() == counts
    labels = sorted(b.label for b in complex_.blocks)
    assert labels == ["1-cube"] * sys.n + ["consistent block"]
    images = [v.f for v in complex_.vertices]
    assert len(set(images)) == len(images)


def test_tree_assembles_to_edges(rng):
    sys = SplitSystemGenerator.random_tree(5, rng)
    complex_ = assemble(sys)
    assert len(complex_.blocks) == len(sys)
    assert all(b.label == "1-cube" for b in complex_.blocks)
    assert tightspan_summary(complex_).splitlines()[0] == f"{len(sys)} blocks: 1-cubes"


def test_single_split():
    complex_ = assemble(SplitSystemGenerator.single_split(3))
    assert complex_.cell_counts() == [2, 1]
    assert tightspan_summary(complex_).splitlines()[0] == "1 block: 1-cube (2V/1E)"


def test_empty_system_is_rejected():
    ground = GroundSet(("a", "b"))
    with pytest.raises(SplitSpanError, match="empty"):
        assemble(WeightedSplitSystem(ground, (), ()))


def test_non_weakly_compatible_is_rejected(octahedral):
    pairs = list(octahedral) + [(Split.from_labels(octahedral.ground, ["1", "4"]), 1)]
    with pytest.raises(WeakCompatibilityError):
        assemble(WeightedSplitSystem.from_pairs(octahedral.ground, pairs))


def test_glued_blocks_meet_at_cut_vertex(glued):
    complex_ = assemble(glued)
    assert len(complex_.blocks) == 2
    a, b = complex_.blocks
    assert set(a.vertices) & set(b.vertices) == set(a.cut_vertices) == set(b.cut_vertices)
    assert len(a.cut_vertices) == 1
    assert len(complex_.vertices) == 14 + 8 - 1


def test_cut_vertex_images_are_shared(composite):
    complex_ = assemble(composite)
    source = complex_.source
    for v in source.cut_vertices:
        vid = complex_.vertex_of[v]
        holders = [b for b in complex_.blocks if vid in b.vertices]
        assert len(holders) >= 2
        assert all(vid in b.cut_vertices for b in holders)


def test_composite_block_shapes(composite):
    complex_ = assemble(composite)
    assert len(complex_.blocks) == len(composite.incompatibility.components) == 4
    labels = sorted(b.label for b in complex_.blocks)
    assert labels == ["1-cube", "1-cube", "3-cube", "rhombic dodecahedron"]
    for a, b in itertools.combinations(complex_.blocks, 2):
        assert len(set(a.vertices) & set(b.vertices)) <= 1


def test_vertices_and_edge_midpoints_are_tight(composite):
    complex_ = assemble(composite)
    d = complex_.metric
    for v in complex_.vertices:
        assert is_tight_point(v, d)
    for u, w in complex_.edges():
        mid = [(a + b) / 2 for a, b in zip(complex_.vertices[u].f, complex_.vertices[w].f)]
        assert is_tight_point(mid, d)


def test_face_relation_is_closed(composite):
    complex_ = assemble(composite)
    by_id = {c.id: c for c in complex_.cells}
    for cell in complex_.cells:
        for f in cell.faces:
            face = by_id[f]
            assert face.dim == cell.dim - 1
            assert face.vertices < cell.vertices
        if cell.dim > 0:
            covered = set().union(*(by_id[f].vertices for f in cell.faces))
            assert covered == set(cell.vertices)


def test_cells_meet_in_common_faces(rd):
    vertex_sets = {c.vertices for c in rd.cells}
    for a, b in itertools.combinations(rd.cells, 2):
        common = a.vertices & b.vertices
        if len(common) > 1:
            assert common in vertex_sets


def test_assembly_is_deterministic(glued):
    assert assemble(glued) == assemble(glued)
    first = assemble(glued)
    assert [v.f for v in first.vertices] == sorted(v.f for v in first.vertices)


def test_metric_is_reproduced(glued):
    assert assemble(glued).metric == metric_of(glued)


# --- block map ---

def test_block_map_octahedral(rd):
    (pair,) = block_map(rd)
    assert pair.buneman.component == pair.tight.component
    assert pair.tight.shape is BlockShape.RHOMBIC_DODECAHEDRON
    assert pair.cells == {}


def _assert_cell_isomorphism(complex_):
    by_id = {c.id: c for c in complex_.cells}
    checked = 0
    for pair in block_map(complex_):
        if pair.tight.shape is not BlockShape.CONSISTENT:
            continue
        assert len(set(pair.cells.values())) == len(pair.cells)
        assert complex_.block_cell_counts(pair.tight) == pair.buneman.cell_counts()
        for cell, tid in pair.cells.items():
            assert by_id[tid].dim == cell.dim
            for facet in cell.facets():
                assert pair.cells[facet] in by_id[tid].faces
        checked += 1
    return checked


def test_block_map_is_cell_isomorphism_on_consistent_blocks(composite):
    complex_ = assemble(composite)
    assert [p.tight.id for p in block_map(complex_)] == list(range(4))
    assert _assert_cell_isomorphism(complex_) == 3


@pytest.mark.parametrize("fixture", ["pentagon", "hexagon"])
def test_block_map_on_consistent_component(fixture, request):
    complex_ = assemble(request.getfixturevalue(fixture))
    assert _assert_cell_isomorphism(complex_) == complex_.ground.n + 1


def test_block_map_needs_source(rd):
    from dataclasses import replace
    with pytest.raises(SplitSpanError):
        block_map(replace(rd, source=None))


# --- corruption hook ---

def test_drop_cell(rd):
    edge = rd.cells_of_dim(1)[0]
    broken = drop_cell(rd, edge.id)
    assert len(broken.edges()) == 23
    assert all(edge.id not in c.faces for c in broken.cells)
    with pytest.raises(SplitSpanError):
        drop_cell(rd, 10_000)
