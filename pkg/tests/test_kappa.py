import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from code.splitspan.buneman import build_complex, taxon_point
from code.splitspan.errors import SplitSpanError, WeakCompatibilityError
from code.splitspan.kappa import (
    TightPoint,
    d1,
    d_inf,
    h_x,
    in_polyhedron,
    is_extremal_at,
    is_tight_point,
    kappa,
    kappa_vertex,
    metric_of,
    octahedral_witness,
)
from code.splitspan.metric import FiniteMetric
from code.splitspan.splits import Split, WeightedSplitSystem
from code.splitspan.workloads import SplitSystemGenerator


def test_d1_basics(octahedral):
    complex_ = build_complex(octahedral)
    v = complex_.vertices[0]
    assert d1(v, v, octahedral) == 0
    for u, w, split in complex_.edges:
        a, b = complex_.vertices[u], complex_.vertices[w]
        assert d1(a, b, octahedral) == octahedral.weight(split)


def test_d1_between_taxa_is_the_metric(glued):
    d = metric_of(glued)
    for x, y in itertools.combinations(range(glued.n), 2):
        assert d1(taxon_point(glued, x), taxon_point(glued, y)) == d(x, y)


def test_kappa_of_taxon_is_its_row(glued):
    d = metric_of(glued)
    for x in range(glued.n):
        assert kappa(taxon_point(glued, x)).f == h_x(d, x).f


def test_kappa_of_octahedral_centre_is_constant(octahedral):
    (cell,) = build_complex(octahedral).maximal_cells
    centre = kappa(cell.generator(octahedral))
    assert centre.f == (Fraction(2),) * 6


def test_kappa_is_affine(circular3):
    complex_ = build_complex(circular3)
    for u, w in itertools.combinations(complex_.vertices[:5], 2):
        p, q = u.to_point(circular3), w.to_point(circular3)
        mid = kappa(p.midpoint(q)).f
        assert mid == tuple((a + b) / 2 for a, b in zip(kappa(p).f, kappa(q).f))


def test_kappa_vertex_matches_kappa(glued):
    for v in build_complex(glued).vertices:
        assert kappa_vertex(glued, v) == kappa(v, glued).f


def test_kappa_needs_system_for_bare_vertex(octahedral):
    v = build_complex(octahedral).vertices[0]
    with pytest.raises(SplitSpanError):
        kappa(v)


def test_kappa_rejects_non_weakly_compatible(octahedral):
    pairs = list(octahedral) + [(Split.from_labels(octahedral.ground, ["1", "4"]), 1)]
    bad = WeightedSplitSystem.from_pairs(octahedral.ground, pairs)
    with pytest.raises(WeakCompatibilityError):
        kappa(taxon_point(bad, 0))


# --- tight points ---

def test_tight_pairs_are_recorded():
    d = FiniteMetric.from_rows(["a", "b"], [[0, 2], [2, 0]])
    p = TightPoint.from_values(d, [1, 1])
    assert p.tight_pairs == frozenset({(0, 1)})
    assert p.as_dict() == {"a": 1, "b": 1}
    with pytest.raises(SplitSpanError):
        TightPoint.from_values(d, [1])


def test_rows_are_tight_points(octahedral):
    d = metric_of(octahedral)
    for x in range(d.n):
        assert is_tight_point(h_x(d, x), d)


def test_large_constant_is_not_tight(octahedral):
    d = metric_of(octahedral)
    assert in_polyhedron([10] * 6, d)
    assert not is_tight_point([10] * 6, d)


def test_kappa_of_every_vertex_is_tight(octahedral, composite):
    for sys in (octahedral, composite):
        d = metric_of(sys)
        for v in build_complex(sys).vertices:
            assert is_tight_point(kappa_vertex(sys, v), d)


def test_d_inf_between_rows_is_distance(rng):
    sys = SplitSystemGenerator.random_tree(6, rng)
    d = metric_of(sys)
    for x, y in itertools.combinations(range(d.n), 2):
        assert d_inf(h_x(d, x), h_x(d, y)) == d(x, y)


# --- collisions ---

def _collisions(sys):
    vertices = build_complex(sys).vertices
    return [
        (u, w) for u, w in itertools.combinations(vertices, 2)
        if kappa_vertex(sys, u) == kappa_vertex(sys, w)
    ]


def test_octahedral_witness(octahedral):
    pairs = _collisions(octahedral)
    assert len(pairs) == 1
    u, w = pairs[0]
    assert octahedral_witness(u, w, octahedral) == frozenset(range(4))


def test_octahedral_witness_preconditions(octahedral):
    vertices = build_complex(octahedral).vertices
    with pytest.raises(SplitSpanError, match="distinct"):
        octahedral_witness(vertices[0], vertices[0], octahedral)
    with pytest.raises(SplitSpanError, match="same image"):
        octahedral_witness(vertices[0], vertices[1], octahedral)


def test_no_collisions_off_octahedral_blocks(circular3, quartet, rng):
    for sys in (circular3, quartet, SplitSystemGenerator.random_tree(7, rng)):
        assert _collisions(sys) == []


def test_unequal_weights_give_no_collision():
    sys = SplitSystemGenerator.octahedral([1, 2, 3, 4])
    assert _collisions(sys) == []


def test_collisions_in_composite_are_octahedral(composite):
    pairs = _collisions(composite)
    assert pairs
    for u, w in pairs:
        support = octahedral_witness(u, w, composite)
        assert len(support) == 4


# --- extremal subsets ---

def test_extremal_step_on_segment():
    d = FiniteMetric.from_rows(["a", "b"], [[0, 2], [2, 0]])
    m = [1, 1]
    step = [Fraction(1, 2), Fraction(-1, 2)]
    assert not is_extremal_at(d, m, step, [m])
    assert is_extremal_at(d, m, step, [[0, 2], [2, 0]])
    # leaving the segment towards larger values is blocked on one side
    assert is_extremal_at(d, m, [1, 1], [m])


def test_extremal_step_on_rhombic_dodecahedron(octahedral):
    d = metric_of(octahedral)
    complex_ = build_complex(octahedral)
    images = [kappa_vertex(octahedral, v) for v in complex_.vertices]
    centre = [Fraction(2)] * 6
    rng = random.Random(5)
    for _ in range(20):
        a, b = rng.sample(images, 2)
        step = [(x - y) / 8 for x, y in zip(a, b)]
        assert is_extremal_at(d, centre, step, images)


@given(st.integers(min_value=0, max_value=15), st.integers(min_value=0, max_value=15),
       st.fractions(min_value=0, max_value=1))
@settings(max_examples=50, deadline=None)
def test_segments_between_octahedral_vertices_stay_in_polyhedron(i, j, t):
    sys = SplitSystemGenerator.octahedral()
    d = metric_of(sys)
    vertices = build_complex(sys).vertices
    a = vertices[i].to_point(sys)
    b = vertices[j].to_point(sys)
    assert in_polyhedron(kappa(a.combine(b, t)), d)
