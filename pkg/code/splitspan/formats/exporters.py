"""
Writers: splits and matrix text files, JSON dictionaries, DOT graphs and
one-line summaries. Every number is written as an exact rational; a
decimal approximation is only ever added next to it.
"""
import json
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence

import networkx as nx

from code.splitspan.buneman import BunemanComplex
from code.splitspan.comparator import ComparisonReport
from code.splitspan.kappa import TightPoint
from code.splitspan.metric import DecompositionResult, FiniteMetric
from code.splitspan.splits import WeightedSplitSystem
from code.splitspan.tightspan import PolytopalComplex

COUNT_NAMES = ("V", "E", "F")


def rational(value: Fraction) -> str:
    return str(Fraction(value))


def decimal(value: Fraction, digits: int) -> str:
    """Round to `digits` places and print without going through float."""
    rounded = round(Fraction(value), digits)
    sign = "-" if rounded < 0 else ""
    scaled = str(int(abs(rounded) * 10 ** digits)).rjust(digits + 1, "0")
    if digits == 0:
        return sign + scaled
    return f"{sign}{scaled[:-digits]}.{scaled[-digits:]}"


def _numbers(values: Iterable[Fraction], digits: Optional[int], key: str) -> Dict[str, List[str]]:
    values = list(values)
    out = {key: [rational(v) for v in values]}
    if digits is not None:
        out[f"{key}_decimal"] = [decimal(v, digits) for v in values]
    return out


def to_json(data: Dict[str, Any]) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def _dot(graph: nx.Graph) -> str:
    """Node and edge `label` attributes become DOT labels."""
    return nx.nx_pydot.to_pydot(graph).to_string()


# --- text files ---------------------------------------------------------------

def splits_to_text(sys: WeightedSplitSystem) -> str:
    lines = ["taxa: " + " ".join(sys.ground.labels)]
    for split, weight in sys:
        side = ",".join(sys.ground.label(i) for i in sorted(split.side))
        lines.append(f"{rational(weight)} : {side}")
    return "\n".join(lines) + "\n"


def matrix_to_text(metric: FiniteMetric) -> str:
    lines = ["taxa: " + " ".join(metric.labels)]
    for row in metric.d:
        lines.append(" ".join(rational(v) for v in row))
    return "\n".join(lines) + "\n"


def counts_label(counts: Sequence[int]) -> str:
    return "/".join(f"{c}{COUNT_NAMES[i]}" for i, c in enumerate(counts[:3]) if c)


# --- tight points -------------------------------------------------------------

def tight_point_to_dict(point: TightPoint, digits: Optional[int] = None) -> Dict[str, Any]:
    labels = point.ground.labels
    data: Dict[str, Any] = {"f": {labels[x]: rational(v) for x, v in enumerate(point.f)}}
    if digits is not None:
        data["f_decimal"] = {labels[x]: decimal(v, digits) for x, v in enumerate(point.f)}
    data["tight"] = [[labels[x], labels[y]] for x, y in sorted(point.tight_pairs)]
    return data


# --- decomposition ------------------------------------------------------------

def decomposition_to_dict(result: DecompositionResult, classes: Sequence[str] = (),
                          digits: Optional[int] = None) -> Dict[str, Any]:
    sys = result.system
    splits = []
    for s, w in sys:
        entry = {"side": [sys.ground.label(i) for i in sorted(s.side)], "weight": rational(w)}
        if digits is not None:
            entry["weight_decimal"] = decimal(w, digits)
        splits.append(entry)
    data = {
        "taxa": list(sys.ground.labels),
        "splits": splits,
        "totally_split_decomposable": result.totally_split_decomposable,
        "weakly_compatible": result.weakly_compatible,
        "component_classes": list(classes),
        "residual": [[rational(v) for v in row] for row in result.residual.d],
    }
    if digits is not None:
        data["residual_decimal"] = [[decimal(v, digits) for v in row] for row in result.residual.d]
    return data


def decomposition_summary(result: DecompositionResult, classes: Sequence[str] = ()) -> str:
    lines = [
        f"{len(result.system)} splits",
        f"totally split-decomposable: {'yes' if result.totally_split_decomposable else 'no'}",
        f"weakly compatible: {'yes' if result.weakly_compatible else 'no'}",
    ]
    if classes:
        lines.append("components: " + ", ".join(classes))
    return "\n".join(lines) + "\n"


# --- Buneman complex ------------------------------------------------------------

def buneman_to_dict(complex_: BunemanComplex) -> Dict[str, Any]:
    sys = complex_.sys
    ids = complex_.vertex_ids
    cell_ids = complex_.cell_ids
    return {
        "taxa": list(sys.ground.labels),
        "splits": [sys.describe(i) for i in range(len(sys))],
        "vertices": [
            {
                "id": i,
                "sides": [
                    [sys.ground.label(x) for x in sorted(s.side if v.choice[k] else s.complement)]
                    for k, s in enumerate(sys.splits)
                ],
            }
            for i, v in enumerate(complex_.vertices)
        ],
        "edges": [{"vertices": [u, v], "split": s} for u, v, s in complex_.edges],
        "cells": [
            {
                "id": cell_ids[c],
                "dim": c.dim,
                "base": ids[c.base],
                "free": sorted(c.free),
                "faces": complex_.facets(c),
            }
            for c in complex_.cells
        ],
        "blocks": [
            {
                "component": sorted(b.component),
                "class": b.component_class.kind.value,
                "cells": [cell_ids[c] for c in b.cells],
                "cut_vertices": [ids[v] for v in b.cut_vertices],
            }
            for b in complex_.blocks
        ],
        "taxa_vertices": {sys.ground.label(x): ids[v] for x, v in enumerate(complex_.taxon_vertices)},
    }


def buneman_summary(complex_: BunemanComplex) -> str:
    ids = complex_.vertex_ids
    lines = [f"Buneman complex: {counts_label(complex_.cell_counts()[:2])}"]
    lines.append("cells by dimension: " + "/".join(str(c) for c in complex_.cell_counts()))
    for b in complex_.blocks:
        cut = ", ".join(str(ids[v]) for v in b.cut_vertices) or "none"
        lines.append(
            f"block {b.index}: splits {sorted(b.component)} ({b.component_class.describe()}), "
            f"{counts_label(b.cell_counts())}, cut vertices: {cut}"
        )
    return "\n".join(lines) + "\n"


def buneman_to_dot(complex_: BunemanComplex) -> str:
    ids = complex_.vertex_ids
    graph = nx.Graph(name="buneman")
    for v, i in ids.items():
        graph.add_node(f"v{i}", label=v.label())
    for u, v, split in complex_.graph.edges(data="split"):
        graph.add_edge(f"v{ids[u]}", f"v{ids[v]}", label=f"S{split}")
    return _dot(graph)


# --- tight span -----------------------------------------------------------------

def tightspan_to_dict(complex_: PolytopalComplex, digits: Optional[int] = None) -> Dict[str, Any]:
    labels = complex_.ground.labels
    return {
        "taxa": list(labels),
        "vertices": [
            {"id": i, **_numbers(v.f, digits, "coords"), **tight_point_to_dict(v, digits)}
            for i, v in enumerate(complex_.vertices)
        ],
        "cells": [
            {
                "id": c.id,
                "dim": c.dim,
                "vertices": sorted(c.vertices),
                "faces": sorted(c.faces),
                "block": c.block,
            }
            for c in complex_.cells
        ],
        "blocks": [
            {
                "id": b.id,
                "component": sorted(b.component),
                "class": b.shape.value,
                "cells": list(b.cells),
                "cut_vertices": list(b.cut_vertices),
                "interior_points": [_numbers(p, digits, "coords") for p in b.interior_points],
            }
            for b in complex_.blocks
        ],
    }


def tightspan_summary(complex_: PolytopalComplex) -> str:
    blocks = complex_.blocks
    noun = "block" if len(blocks) == 1 else "blocks"
    labels = [b.label for b in blocks]
    counts = [counts_label(complex_.block_cell_counts(b)) for b in blocks]
    if len(blocks) > 1 and len(set(labels)) == 1 and len(set(counts)) == 1:
        head = f"{len(blocks)} {noun}: {labels[0]}s"
    else:
        head = f"{len(blocks)} {noun}: " + ", ".join(f"{l} ({c})" for l, c in zip(labels, counts))
    lines = [head, f"{len(complex_.vertices)} vertices, {len(complex_.edges())} edges"]
    return "\n".join(lines) + "\n"


def tightspan_to_dot(complex_: PolytopalComplex) -> str:
    graph = nx.relabel_nodes(complex_.skeleton(), lambda i: f"v{i}")
    graph.name = "tightspan"
    return _dot(graph)


# --- verification ---------------------------------------------------------------

def verification_to_dict(report: ComparisonReport, digits: Optional[int] = None) -> Dict[str, Any]:
    """The comparator report, with decimals next to every mismatched coordinate."""
    data = report.to_dict()
    if digits is None:
        return data
    for key in ("missing_vertices", "extra_vertices"):
        data[f"{key}_decimal"] = [[decimal(v, digits) for v in coords] for coords in getattr(report, key)]
    for key in ("missing_edges", "extra_edges"):
        data[f"{key}_decimal"] = [
            [[decimal(v, digits) for v in end] for end in edge] for edge in getattr(report, key)
        ]
    return data
