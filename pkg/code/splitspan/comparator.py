import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from code.splitspan.config import DEFAULT_ORACLE_CAP
from code.splitspan.kappa import TightPoint
from code.splitspan.linalg import affine_rank
from code.splitspan.metric import FiniteMetric
from code.splitspan.oracle import ConstraintSystem, oracle_blocks, oracle_edges, oracle_vertices
from code.splitspan.tightspan import PolytopalComplex

logger = logging.getLogger(__name__)

Coords = Tuple[Fraction, ...]


@dataclass
class CellCheck:
    cell: int
    dim: int
    affine_dim: int
    face_dim: int

    @property
    def ok(self) -> bool:
        return self.affine_dim == self.dim and self.face_dim >= self.dim

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cell": self.cell,
            "dim": self.dim,
            "affine_dim": self.affine_dim,
            "face_dim": self.face_dim,
            "ok": self.ok,
        }


@dataclass
class ComparisonReport:
    vertices_match: bool
    edges_match: bool
    oracle_block_count: int
    structural_block_count: int
    cell_checks: List[CellCheck] = field(default_factory=list)
    missing_vertices: List[Coords] = field(default_factory=list)
    extra_vertices: List[Coords] = field(default_factory=list)
    missing_edges: List[Tuple[Coords, Coords]] = field(default_factory=list)
    extra_edges: List[Tuple[Coords, Coords]] = field(default_factory=list)

    @property
    def blocks_match(self) -> bool:
        return self.oracle_block_count == self.structural_block_count

    @property
    def cells_ok(self) -> bool:
        return all(c.ok for c in self.cell_checks)

    @property
    def passed(self) -> bool:
        return self.vertices_match and self.edges_match and self.blocks_match and self.cells_ok

    def to_dict(self) -> Dict[str, Any]:
        def fmt(coords: Coords) -> List[str]:
            return [str(v) for v in coords]

        return {
            "vertices_match": self.vertices_match,
            "edges_match": self.edges_match,
            "block_count": {"oracle": self.oracle_block_count, "structural": self.structural_block_count},
            "cell_checks": [c.to_dict() for c in self.cell_checks],
            "missing_vertices": [fmt(v) for v in self.missing_vertices],
            "extra_vertices": [fmt(v) for v in self.extra_vertices],
            "missing_edges": [[fmt(u), fmt(v)] for u, v in self.missing_edges],
            "extra_edges": [[fmt(u), fmt(v)] for u, v in self.extra_edges],
            "passed": self.passed,
        }


class TightSpanComparator:
    """
    Checks an assembled tight span against the brute-force oracle.
    Mismatches end up in the report; nothing is raised for them.
    """

    def __init__(self, cap: int = DEFAULT_ORACLE_CAP, method: str = "walk", workers: int = 1):
        self.cap = cap
        self.method = method
        self.workers = workers

    def compare(self, structural: PolytopalComplex, d: FiniteMetric,
                oracle_points: Optional[List[TightPoint]] = None) -> ComparisonReport:
        if oracle_points is None:
            oracle_points = oracle_vertices(d, cap=self.cap, method=self.method)
        oracle_pairs = oracle_edges(d, oracle_points, workers=self.workers)

        oracle_set = {p.f for p in oracle_points}
        structural_set = {v.f for v in structural.vertices}
        oracle_edge_set = {self._edge(oracle_points[i].f, oracle_points[j].f) for i, j in oracle_pairs}
        structural_edge_set = {
            self._edge(structural.vertices[i].f, structural.vertices[j].f) for i, j in structural.edges()
        }

        report = ComparisonReport(
            vertices_match=oracle_set == structural_set,
            edges_match=oracle_edge_set == structural_edge_set,
            oracle_block_count=oracle_blocks(len(oracle_points), oracle_pairs),
            structural_block_count=len(structural.blocks),
            cell_checks=self._check_cells(structural, d),
            missing_vertices=sorted(oracle_set - structural_set),
            extra_vertices=sorted(structural_set - oracle_set),
            missing_edges=sorted(tuple(sorted(e)) for e in oracle_edge_set - structural_edge_set),
            extra_edges=sorted(tuple(sorted(e)) for e in structural_edge_set - oracle_edge_set),
        )
        if report.passed:
            logger.info("Structural tight span matches the oracle")
        else:
            logger.warning(
                f"Oracle mismatch: vertices {report.vertices_match}, edges {report.edges_match}, "
                f"blocks {report.oracle_block_count}/{report.structural_block_count}, cells {report.cells_ok}"
            )
        return report

    @staticmethod
    def _edge(u: Coords, v: Coords) -> FrozenSet[Coords]:
        return frozenset((u, v))

    @staticmethod
    def _check_cells(structural: PolytopalComplex, d: FiniteMetric) -> List[CellCheck]:
        system = ConstraintSystem(d)
        checks = []
        for cell in structural.cells:
            if cell.dim == 0:
                continue
            coords = [structural.vertices[v].f for v in sorted(cell.vertices)]
            common = set(system.pairs)
            for c in coords:
                common &= set(system.tight(c))
            checks.append(CellCheck(
                cell=cell.id,
                dim=cell.dim,
                affine_dim=affine_rank(coords),
                face_dim=system.face_dimension(sorted(common)),
            ))
        return checks


def compare(structural: PolytopalComplex, d: FiniteMetric, cap: int = DEFAULT_ORACLE_CAP,
            method: str = "walk", workers: int = 1) -> ComparisonReport:
    return TightSpanComparator(cap=cap, method=method, workers=workers).compare(structural, d)
