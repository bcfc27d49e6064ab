"""
Split system fixtures and random instance generators.

Fixtures:
- octahedral: four splits over six taxa forming an octahedral system
- circular: m consecutive arcs of length m on 2m taxa
- full_circular: all arcs of a cyclic order; one consistent block
- glued / composite: an octahedral system and a circular triple sharing taxa
Random instances take a random.Random so suites are reproducible.
"""

import random
from fractions import Fraction
from typing import List, Optional, Sequence

import networkx as nx

from code.splitspan.metric import FiniteMetric
from code.splitspan.splits import GroundSet, Split, WeightedSplitSystem


class SplitSystemGenerator:
    """Generate split systems for tests, scripts and benchmarks"""

    OCTAHEDRAL_SIDES = (
        ("1", "2", "3"),
        ("2", "3", "4"),
        ("3", "4", "5"),
        ("1", "3", "5"),
    )

    @staticmethod
    def _weights(count: int, weights: Optional[Sequence]) -> List[Fraction]:
        if weights is None:
            return [Fraction(1)] * count
        if len(weights) != count:
            raise ValueError(f"expected {count} weights, got {len(weights)}")
        return [Fraction(w) for w in weights]

    @classmethod
    def octahedral(cls, weights: Optional[Sequence] = None) -> WeightedSplitSystem:
        """
        The octahedral system on 1..6:
        {1,2,3}|{4,5,6}, {2,3,4}|{5,6,1}, {3,4,5}|{6,1,2}, {1,3,5}|{2,4,6}.
        Weights follow that order.
        """
        labels = [str(i) for i in range(1, 7)]
        return WeightedSplitSystem.from_labelled(labels, zip(cls.OCTAHEDRAL_SIDES, cls._weights(4, weights)))

    @classmethod
    def circular(cls, m: int, weights: Optional[Sequence] = None) -> WeightedSplitSystem:
        """Splits {i, ..., i+m-1} | rest on 1..2m for i = 1..m."""
        if m < 1:
            raise ValueError("m must be positive")
        labels = [str(i) for i in range(1, 2 * m + 1)]
        sides = [[str(j) for j in range(i, i + m)] for i in range(1, m + 1)]
        return WeightedSplitSystem.from_labelled(labels, zip(sides, cls._weights(m, weights)))

    @classmethod
    def full_circular(cls, n: int, weights: Optional[Sequence] = None) -> WeightedSplitSystem:
        """Every arc of the cyclic order 1..n, trivial splits included."""
        if n < 3:
            raise ValueError("n must be at least 3")
        ground = GroundSet(tuple(str(i) for i in range(1, n + 1)))
        arcs = {
            Split(frozenset((start + j) % n for j in range(length)), n): None
            for start in range(n)
            for length in range(1, n)
        }
        splits = sorted(arcs, key=lambda s: s.sort_key)
        return WeightedSplitSystem.from_pairs(ground, zip(splits, cls._weights(len(splits), weights)))

    @classmethod
    def single_split(cls, weight=1) -> WeightedSplitSystem:
        return WeightedSplitSystem.from_labelled(["a", "b"], [(["b"], weight)])

    @classmethod
    def glued(cls, octahedral_weights: Optional[Sequence] = None,
              circular_weights: Optional[Sequence] = None) -> WeightedSplitSystem:
        """
        An octahedral system and a circular triple on ten taxa.

        The octahedral parts are {c2..c6}, o2, ..., o6; the circular parts
        are {o2..o6}, c2, ..., c6. The two blocks share one cut vertex.
        """
        os_ = [f"o{i}" for i in range(2, 7)]
        cs = [f"c{i}" for i in range(2, 7)]
        x = [cs] + [[o] for o in os_]           # X1..X6
        y = [os_] + [[c] for c in cs]           # Y1..Y6

        def union(parts, indices):
            return [label for i in indices for label in parts[i]]

        octahedral = [union(x, (0, 1, 2)), union(x, (1, 2, 3)), union(x, (2, 3, 4)), union(x, (0, 2, 4))]
        circular = [union(y, (0, 1, 2)), union(y, (1, 2, 3)), union(y, (2, 3, 4))]
        pairs = list(zip(octahedral, cls._weights(4, octahedral_weights)))
        pairs += list(zip(circular, cls._weights(3, circular_weights)))
        return WeightedSplitSystem.from_labelled(os_ + cs, pairs)

    @classmethod
    def composite(cls, bridge_weight=1, pendant_weight=1) -> WeightedSplitSystem:
        """
        glued() plus the split {o2..o6}|{c2..c6} and the trivial split {o2}:
        a rhombic dodecahedron, a 3-cube and two 1-cubes.
        """
        base = cls.glued()
        pairs = list(base)
        pairs.append((Split.from_labels(base.ground, [f"o{i}" for i in range(2, 7)]), Fraction(bridge_weight)))
        pairs.append((Split.from_labels(base.ground, ["o2"]), Fraction(pendant_weight)))
        return WeightedSplitSystem.from_pairs(base.ground, pairs)

    @staticmethod
    def random_weight(rng: random.Random, max_numerator: int = 12, max_denominator: int = 6) -> Fraction:
        return Fraction(rng.randint(1, max_numerator), rng.randint(1, max_denominator))

    @classmethod
    def random_tree(cls, leaves: int, rng: random.Random) -> WeightedSplitSystem:
        """
        Splits of a random binary tree grown by stepwise leaf insertion,
        with random rational edge lengths as weights.
        """
        if leaves < 2:
            raise ValueError("a tree needs at least 2 leaves")
        labels = [f"t{i}" for i in range(leaves)]
        tree = nx.Graph()
        if leaves == 2:
            tree.add_edge(labels[0], labels[1])
        else:
            tree.add_edges_from([("v0", labels[0]), ("v0", labels[1]), ("v0", labels[2])])
            for k in range(3, leaves):
                u, v = rng.choice(sorted(tree.edges(), key=lambda e: tuple(sorted(e))))
                inner = f"v{k - 2}"
                tree.remove_edge(u, v)
                tree.add_edges_from([(u, inner), (inner, v), (inner, labels[k])])

        ground = GroundSet(tuple(labels))
        leaf_set = set(labels)
        pairs = []
        for u, v in sorted(tree.edges(), key=lambda e: tuple(sorted(e))):
            cut = tree.copy()
            cut.remove_edge(u, v)
            side = nx.node_connected_component(cut, u) & leaf_set
            pairs.append((Split.from_labels(ground, side), cls.random_weight(rng)))
        return WeightedSplitSystem.from_pairs(ground, pairs)

    @classmethod
    def random_circular(cls, n: int, m: int, rng: random.Random, trivial: bool = True) -> WeightedSplitSystem:
        """Up to m distinct arcs of a random cyclic order of n taxa."""
        labels = [f"x{i}" for i in range(n)]
        order = list(range(n))
        rng.shuffle(order)
        ground = GroundSet(tuple(labels))
        arcs = {}
        for start in range(n):
            for length in range(1, n):
                split = Split(frozenset(order[(start + j) % n] for j in range(length)), n)
                if not trivial and split.is_trivial:
                    continue
                arcs[split] = None
        candidates = sorted(arcs, key=lambda s: s.sort_key)
        chosen = rng.sample(candidates, min(m, len(candidates)))
        return WeightedSplitSystem.from_pairs(ground, [(s, cls.random_weight(rng)) for s in chosen])

    @classmethod
    def random_splits(cls, n: int, m: int, rng: random.Random) -> WeightedSplitSystem:
        """Up to m distinct arbitrary splits on n taxa."""
        labels = [f"x{i}" for i in range(n)]
        ground = GroundSet(tuple(labels))
        found = {}
        for _ in range(4 * m):
            if len(found) == m:
                break
            mask = rng.randint(1, (1 << (n - 1)) - 1)
            split = Split(frozenset(i + 1 for i in range(n - 1) if mask >> i & 1), n)
            found[split] = None
        splits = sorted(found, key=lambda s: s.sort_key)
        return WeightedSplitSystem.from_pairs(ground, [(s, cls.random_weight(rng)) for s in splits])

    @staticmethod
    def k23_metric() -> FiniteMetric:
        """Path metric of K_{2,3} with unit edges."""
        labels = ["a1", "a2", "b1", "b2", "b3"]
        left = {"a1", "a2"}
        rows = []
        for x in labels:
            row = []
            for y in labels:
                if x == y:
                    row.append(0)
                elif (x in left) == (y in left):
                    row.append(2)
                else:
                    row.append(1)
            rows.append(row)
        return FiniteMetric.from_rows(labels, rows)
