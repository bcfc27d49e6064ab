"""
Brute-force tight span of a finite metric, straight from the polyhedron

    P(d) = { f : f(x) + f(y) >= d(x, y) for all x, y }.

Nothing here looks at splits. Vertices are found either by walking the
bounded edges of P(d) from the vertices h_x, or by enumerating basic
solutions of the constraint system.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx

from code.splitspan.config import DEFAULT_ORACLE_CAP
from code.splitspan.errors import CapacityError
from code.splitspan.kappa import TightPoint, is_tight_point
from code.splitspan.linalg import rank, solve
from code.splitspan.metric import FiniteMetric

logger = logging.getLogger(__name__)

Coords = Tuple[Fraction, ...]
Pair = Tuple[int, int]


@dataclass(frozen=True)
class ConstraintSystem:
    """One row f(x) + f(y) >= d(x, y) per unordered pair, x = y included."""
    metric: FiniteMetric

    @cached_property
    def pairs(self) -> Tuple[Pair, ...]:
        return tuple(itertools.combinations_with_replacement(range(self.metric.n), 2))

    def __len__(self) -> int:
        return len(self.pairs)

    def row(self, pair: Pair) -> List[Fraction]:
        x, y = pair
        out = [Fraction(0)] * self.metric.n
        out[x] += 1
        out[y] += 1
        return out

    def rhs(self, pair: Pair) -> Fraction:
        return self.metric(*pair)

    def slack(self, f: Sequence[Fraction], pair: Pair) -> Fraction:
        x, y = pair
        return f[x] + f[y] - self.metric(x, y)

    def is_feasible(self, f: Sequence[Fraction]) -> bool:
        return all(self.slack(f, p) >= 0 for p in self.pairs)

    def tight(self, f: Sequence[Fraction]) -> List[Pair]:
        return [p for p in self.pairs if self.slack(f, p) == 0]

    def tight_rank(self, pairs: Sequence[Pair]) -> int:
        return rank([self.row(p) for p in pairs], self.metric.n)

    def face_dimension(self, pairs: Sequence[Pair]) -> int:
        """Dimension of the solution space of the equalities on `pairs`."""
        return self.metric.n - self.tight_rank(pairs)


def _check_cap(d: FiniteMetric, cap: int) -> None:
    if d.n > cap:
        raise CapacityError(
            f"the oracle is capped at {cap} taxa and the input has {d.n}; "
            f"use --oracle-cap {d.n} (with --force-oracle-cap above {DEFAULT_ORACLE_CAP}) to run it anyway"
        )


def _tight_graph(system: ConstraintSystem, f: Coords) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(system.metric.n))
    graph.add_edges_from(system.tight(f))
    return graph


def _all_non_bipartite(graph: nx.Graph, nodes: Set[int]) -> bool:
    rest = graph.subgraph(nodes)
    return all(not nx.is_bipartite(rest.subgraph(c)) for c in nx.connected_components(rest))


def _independent_sets(graph: nx.Graph, candidates: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    """Nonempty independent subsets of `candidates`, grown in index order."""
    def extend(chosen: Tuple[int, ...], start: int) -> Iterator[Tuple[int, ...]]:
        for k in range(start, len(candidates)):
            x = candidates[k]
            if any(graph.has_edge(x, y) for y in chosen):
                continue
            grown = chosen + (x,)
            yield grown
            yield from extend(grown, k + 1)

    yield from extend((), 0)


def _extreme_directions(graph: nx.Graph) -> Iterator[Tuple[int, ...]]:
    """
    Extreme rays of the cone {e : e_x + e_y >= 0 on tight pairs}.

    Each is 1_P - 1_Q: either Q is a loop-free independent set with
    P = N(Q) and the P-Q edges connecting P ∪ Q, or Q is empty and P is
    a single taxon. In both cases every component outside P ∪ Q must be
    non-bipartite, so the remaining coordinates are pinned to zero.
    """
    nodes = list(graph.nodes)
    everything = set(nodes)
    loops = {x for x in nodes if graph.has_edge(x, x)}

    for p in nodes:
        if _all_non_bipartite(graph, everything - {p}):
            yield tuple(1 if x == p else 0 for x in nodes)

    candidates = [x for x in nodes if x not in loops]
    for q in _independent_sets(graph, candidates):
        qs = set(q)
        ps = set().union(*(set(graph.neighbors(x)) for x in q))
        if not ps:
            continue
        w = ps | qs
        bridge = nx.Graph()
        bridge.add_nodes_from(w)
        bridge.add_edges_from((a, b) for a in qs for b in graph.neighbors(a))
        if not nx.is_connected(bridge):
            continue
        if not _all_non_bipartite(graph, everything - w):
            continue
        yield tuple(1 if x in ps else -1 if x in qs else 0 for x in nodes)


def _shoot(system: ConstraintSystem, f: Coords, e: Sequence[int]) -> Optional[Coords]:
    """Furthest point of P(d) along f + λe, or None if the ray is unbounded."""
    step: Optional[Fraction] = None
    for x, y in system.pairs:
        slope = e[x] + e[y]
        if slope < 0:
            limit = system.slack(f, (x, y)) / -slope
            if step is None or limit < step:
                step = limit
    if step is None:
        return None
    return tuple(v + step * k for v, k in zip(f, e))


def _walk(system: ConstraintSystem) -> Tuple[List[Coords], Set[Tuple[Coords, Coords]]]:
    d = system.metric
    seeds = {tuple(d.row(x)) for x in range(d.n)}
    seen = set(seeds)
    stack = sorted(seeds)
    edges: Set[Tuple[Coords, Coords]] = set()
    while stack:
        f = stack.pop()
        graph = _tight_graph(system, f)
        for e in _extreme_directions(graph):
            g = _shoot(system, f, e)
            if g is None:
                continue
            edges.add((min(f, g), max(f, g)))
            if g not in seen:
                seen.add(g)
                stack.append(g)
    logger.debug(f"Edge walk visited {len(seen)} vertices along {len(edges)} bounded edges")
    return sorted(seen), edges


def _basic_solutions(system: ConstraintSystem) -> List[Coords]:
    n = system.metric.n
    full = (1 << n) - 1
    covers = [(1 << x) | (1 << y) for x, y in system.pairs]
    found = set()
    for chosen in itertools.combinations(range(len(system)), n):
        covered = 0
        for i in chosen:
            covered |= covers[i]
        # every taxon must appear in some equality of a basis
        if covered != full:
            continue
        pairs = [system.pairs[i] for i in chosen]
        f = solve([system.row(p) for p in pairs], [system.rhs(p) for p in pairs])
        if f is not None and system.is_feasible(f):
            found.add(tuple(f))
    return sorted(found)


def oracle_vertices(d: FiniteMetric, cap: int = DEFAULT_ORACLE_CAP, method: str = "walk") -> List[TightPoint]:
    """
    All vertices of P(d), sorted by coordinates.

    method="walk" follows bounded edges from the h_x; method="basis"
    solves every covering n-subset of constraints and is only practical
    for a handful of taxa.
    """
    _check_cap(d, cap)
    system = ConstraintSystem(d)
    if method == "walk":
        coords, _ = _walk(system)
    elif method == "basis":
        coords = _basic_solutions(system)
    else:
        raise ValueError(f"Unknown oracle method: {method!r}")
    points = [TightPoint.from_values(d, c) for c in coords]
    for p in points:
        if not is_tight_point(p, d):
            logger.warning(f"Oracle vertex {p.f} is not a tight point")
    logger.info(f"Oracle found {len(points)} vertices for {d.n} taxa")
    return points


def _is_edge(system: ConstraintSystem, u: Coords, v: Coords) -> bool:
    mid = tuple((a + b) / 2 for a, b in zip(u, v))
    if system.face_dimension(system.tight(mid)) != 1:
        return False
    return is_tight_point(mid, system.metric)


def oracle_edges(d: FiniteMetric, vertices: Sequence[TightPoint], workers: int = 1) -> List[Tuple[int, int]]:
    """Index pairs (i < j) of vertices joined by a bounded edge of P(d)."""
    system = ConstraintSystem(d)
    coords = [v.f for v in vertices]
    pairs = list(itertools.combinations(range(len(coords)), 2))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flags = list(pool.map(lambda p: _is_edge(system, coords[p[0]], coords[p[1]]), pairs))
    else:
        flags = [_is_edge(system, coords[i], coords[j]) for i, j in pairs]
    edges = [p for p, keep in zip(pairs, flags) if keep]
    logger.info(f"Oracle found {len(edges)} edges among {len(coords)} vertices")
    return edges


def oracle_blocks(vertex_count: int, edges: Sequence[Tuple[int, int]]) -> int:
    """Number of blocks (biconnected pieces) of the oracle 1-skeleton."""
    graph = nx.Graph()
    graph.add_nodes_from(range(vertex_count))
    graph.add_edges_from(edges)
    return sum(1 for _ in nx.biconnected_components(graph))
