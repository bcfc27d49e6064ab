import itertools
from fractions import Fraction

import pytest

from code.splitspan.buneman import (
    BunemanCell,
    BunemanPoint,
    build_complex,
    delta,
    enumerate_cells,
    enumerate_vertices,
    gate,
    same_block,
    taxon_point,
    taxon_vertex,
)
from code.splitspan.errors import CapacityError, SplitSpanError
from code.splitspan.kappa import d1
from code.splitspan.metric import synthesize
from code.splitspan.workloads import SplitSystemGenerator


@pytest.fixture
def cube(octahedral):
    return build_complex(octahedral)


# --- points and taxa ---

def test_taxon_point_of_octahedral(octahedral):
    p = taxon_point(octahedral, "1")
    for i, split in enumerate(octahedral.splits):
        assert p.value(i, split.side) == Fraction(1, 2)
        assert p.value(i, split.complement) == 0
    assert p.is_valid()
    assert p.is_vertex()


def test_every_taxon_point_is_a_valid_vertex(glued):
    for x in range(glued.n):
        p = taxon_point(glued, x)
        assert p.is_valid()
        assert taxon_vertex(glued, x).is_valid(glued)


def test_single_split_taxon_points_are_the_two_vertices():
    sys = SplitSystemGenerator.single_split()
    vertices = enumerate_vertices(sys)
    assert sorted([taxon_vertex(sys, "a"), taxon_vertex(sys, "b")]) == vertices


def test_unknown_taxon(octahedral):
    with pytest.raises(SplitSpanError):
        taxon_point(octahedral, "7")
    with pytest.raises(SplitSpanError):
        taxon_point(octahedral, 6)


def test_point_outside_box(octahedral):
    with pytest.raises(SplitSpanError):
        BunemanPoint(octahedral, (Fraction(1), 0, 0, 0))


def test_buneman_condition(octahedral, quartet):
    assert BunemanPoint(octahedral, (Fraction(1, 4),) * 4).is_valid()
    # S1 = {b,c,d}|{a} and S3 = {c,d}|{a,b} are compatible, so both cannot be free
    quarter = Fraction(1, 4)
    assert not BunemanPoint(quartet, (0, quarter, 0, quarter, 0)).is_valid()
    assert BunemanPoint(quartet, (0, quarter, 0, 0, 0)).is_valid()


# --- vertices ---

def test_octahedral_has_sixteen_vertices(octahedral):
    assert len(enumerate_vertices(octahedral)) == 16


def test_bfs_matches_exhaustive(octahedral, glued, quartet):
    for sys in (octahedral, glued, quartet):
        assert enumerate_vertices(sys) == enumerate_vertices(sys, method="exhaustive")


def test_tree_vertices_are_tree_nodes(rng):
    sys = SplitSystemGenerator.random_tree(7, rng)
    assert len(enumerate_vertices(sys)) == len(sys) + 1


def test_single_split_has_two_vertices():
    assert len(enumerate_vertices(SplitSystemGenerator.single_split())) == 2


def test_vertex_bound(glued):
    with pytest.raises(CapacityError, match="max-splits"):
        enumerate_vertices(glued, max_splits=5)


def test_unknown_enumeration_method(octahedral):
    with pytest.raises(ValueError):
        enumerate_vertices(octahedral, method="dfs")


# --- cells ---

def test_octahedral_cells_form_a_4_cube(cube):
    assert cube.cell_counts() == [16, 32, 24, 8, 1]
    assert [c.dim for c in cube.maximal_cells] == [4]


def test_circular_triple_is_one_3_cube(circular3):
    complex_ = build_complex(circular3)
    assert complex_.cell_counts() == [8, 12, 6, 1]
    assert [c.dim for c in complex_.maximal_cells] == [3]


def test_tree_maximal_cells_are_edges(quartet):
    complex_ = enumerate_cells(quartet)
    assert all(c.dim == 1 for c in complex_.maximal_cells)
    assert len(complex_.maximal_cells) == len(quartet)


def test_cell_vertices_are_valid(cube, octahedral):
    for cell in cube.cells:
        assert len(cell.vertices()) == 2 ** cell.dim
        assert all(v.is_valid(octahedral) for v in cell.vertices())


def test_generator_is_interior(cube, octahedral):
    for cell in cube.cells:
        p = cell.generator(octahedral)
        assert p.free == cell.free
        assert p.is_valid()
        assert cell.contains_point(p)
        assert cube.carrier(p) == cell


def test_facets_are_cells(cube):
    ids = cube.cell_ids
    for cell in cube.cells:
        assert len(cube.facets(cell)) == 2 * cell.dim
        for f in cell.facets():
            assert f in ids


def test_cells_fixed_off_their_free_splits(glued):
    complex_ = build_complex(glued)
    for cell in complex_.cells:
        vertices = cell.vertices()
        for i in range(len(glued)):
            if i not in cell.free:
                assert len({v.choice[i] for v in vertices}) == 1


def test_edges_carry_one_split(cube):
    for u, v, split in cube.edges:
        assert delta(cube.vertices[u], cube.vertices[v], cube.sys) == frozenset({split})


def test_edge_label_counts_invariant_under_taxon_reordering(glued):
    labels = glued.ground.labels
    reordered = type(glued).from_labelled(
        list(reversed(labels)),
        [([labels[x] for x in split.side], w) for split, w in glued],
    )

    def label_counts(sys):
        complex_ = build_complex(sys)
        return sorted(sum(1 for _, _, s in complex_.edges if s == i) for i in range(len(sys)))

    assert label_counts(glued) == label_counts(reordered) == [4, 4, 4, 8, 8, 8, 8]


# --- blocks ---

def test_octahedral_is_one_block(cube):
    (block,) = cube.blocks
    assert block.component == frozenset(range(4))
    assert block.cut_vertices == ()
    assert block.cell_counts() == [16, 32, 24, 8, 1]


def test_tree_blocks_are_edges(rng):
    sys = SplitSystemGenerator.random_tree(6, rng)
    complex_ = build_complex(sys)
    assert len(complex_.blocks) == len(sys)
    assert all(b.cell_counts() == [2, 1] for b in complex_.blocks)


def test_glued_blocks_share_one_cut_vertex(glued):
    complex_ = build_complex(glued)
    assert len(complex_.blocks) == 2
    assert len(complex_.cut_vertices) == 1
    a, b = complex_.blocks
    assert set(a.vertices) & set(b.vertices) == set(complex_.cut_vertices)
    assert len(complex_.vertices) == 16 + 8 - 1


def test_blocks_share_at_most_one_vertex(composite):
    complex_ = build_complex(composite)
    assert len(complex_.blocks) == len(composite.incompatibility.components)
    for a, b in itertools.combinations(complex_.blocks, 2):
        assert len(set(a.vertices) & set(b.vertices)) <= 1


def test_block_of_component(glued):
    complex_ = build_complex(glued)
    for block in complex_.blocks:
        assert complex_.block_of_component(block.component) is block
    with pytest.raises(SplitSpanError):
        complex_.block_of_component({0, 4})


def test_values_off_component_are_zero_or_half_weight(composite):
    complex_ = build_complex(composite)
    for block in complex_.blocks:
        for cell in block.cells:
            p = cell.generator(composite)
            for i, (t, w) in enumerate(zip(p.values, composite.weights)):
                if i not in block.component:
                    assert t in (0, w / 2)


# --- delta and same_block ---

def test_delta(octahedral, cube):
    v = cube.vertices[0]
    assert delta(v, v, octahedral) == frozenset()
    p, q = taxon_point(octahedral, 0), taxon_point(octahedral, 3)
    separating = frozenset(i for i, s in enumerate(octahedral.splits) if s.separates(0, 3))
    assert delta(p, q) == separating


def test_same_block_in_octahedral(cube, octahedral):
    for u, v in itertools.combinations(cube.vertices, 2):
        assert same_block(u, v, range(4), octahedral)


def test_same_block_across_glued_blocks(glued):
    complex_ = build_complex(glued)
    a, b = complex_.blocks
    cut = next(iter(complex_.cut_vertices))
    u = next(v for v in a.vertices if v != cut)
    w = next(v for v in b.vertices if v != cut)
    assert not same_block(u, w, a.component, glued)
    assert not same_block(u, w, b.component, glued)
    assert same_block(cut, u, a.component, glued)
    assert not same_block(cut, u, b.component, glued)


def test_same_block_matches_geometry_for_interior_points(glued):
    complex_ = build_complex(glued)
    points = [c.generator(glued) for c in complex_.maximal_cells]
    for p, q in itertools.combinations(points, 2):
        for block in complex_.blocks:
            both = block.contains_point(p) and block.contains_point(q)
            assert same_block(p, q, block.component) == both


# --- gates ---

def test_gate_of_own_cell_is_taxon_point(cube, octahedral):
    for x in range(octahedral.n):
        v = taxon_vertex(octahedral, x)
        for cell in cube.cells:
            if cell.contains_vertex(v):
                assert gate(octahedral, cell, x) == taxon_point(octahedral, x)


def test_gate_equation_on_4_cube(cube, octahedral):
    (cell,) = cube.maximal_cells
    for x in range(octahedral.n):
        phi = taxon_point(octahedral, x)
        g = gate(octahedral, cell, x)
        for v in cell.vertices():
            assert d1(phi, v, octahedral) == d1(phi, g) + d1(g, v, octahedral)


def test_gate_distances_count_free_splits(cube, octahedral):
    d = synthesize(octahedral)
    (cell,) = cube.maximal_cells
    for x, y in itertools.combinations(range(octahedral.n), 2):
        expected = sum(
            (octahedral.weight(i) for i in cell.free if octahedral.splits[i].separates(x, y)),
            Fraction(0),
        )
        assert d1(gate(octahedral, cell, x), gate(octahedral, cell, y)) == expected
        assert expected == d(x, y)


def test_gate_of_small_cell(glued):
    complex_ = build_complex(glued)
    cell = BunemanCell(complex_.vertices[0], frozenset())
    assert gate(glued, cell, 0) == complex_.vertices[0].to_point(glued)
