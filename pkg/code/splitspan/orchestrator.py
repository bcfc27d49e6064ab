import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from code.splitspan.buneman import BunemanComplex, build_complex
from code.splitspan.comparator import TightSpanComparator
from code.splitspan.config import Config
from code.splitspan.errors import SplitSpanError
from code.splitspan.formats import exporters
from code.splitspan.formats.parsers import ParsedInput, load, parse_text
from code.splitspan.kappa import metric_of
from code.splitspan.metric import DecompositionResult, decompose
from code.splitspan.splits import WeightedSplitSystem, classify_components, find_weak_compatibility_violation
from code.splitspan.tightspan import PolytopalComplex, assemble, drop_cell
from code.splitspan.timing import PhaseTimer

logger = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    """
    Outcome of one pipeline: a JSON-ready report, the text rendering, an
    optional DOT rendering and the underlying object.
    """
    command: str
    data: Dict[str, Any]
    text: str
    summary: str
    dot: Optional[str] = None
    ok: bool = True
    artifact: Any = None
    timings: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return exporters.to_json(self.data)
        if fmt == "dot":
            if self.dot is None:
                raise SplitSpanError(f"the {self.command} command has no DOT output")
            return self.dot
        return self.text


class Orchestrator:
    """
    Runs the split-span pipelines: decompose, check, buneman, tightspan
    and verify. Shared by the CLI, the HTTP API and the scripts.
    """

    def __init__(self, config: Optional[Config] = None):
        self.config = config or Config()

    # --- input ---------------------------------------------------------------

    def load(self, path: Optional[str] = None, text: Optional[str] = None,
             kind: Optional[str] = None) -> ParsedInput:
        kind = kind or self.config.input_kind
        if text is not None:
            return parse_text(text, kind)
        path = path or self.config.input_path
        if path is None:
            raise SplitSpanError("no input given")
        return load(path, kind)

    def system_of(self, parsed: ParsedInput) -> WeightedSplitSystem:
        """The split system of the input, decomposing a matrix first."""
        if parsed.system is not None:
            return parsed.system
        result = decompose(parsed.metric, self.config.max_decompose_taxa, self.config.workers)
        if not result.totally_split_decomposable:
            raise SplitSpanError("the metric is not totally split-decomposable (nonzero residual)")
        return result.system

    # --- pipelines -----------------------------------------------------------

    def decompose(self, parsed: ParsedInput) -> PipelineResult:
        if parsed.metric is None:
            raise SplitSpanError("decompose needs a distance matrix, got a splits file")
        result: DecompositionResult = decompose(parsed.metric, self.config.max_decompose_taxa, self.config.workers)
        classes = self._classes(result.system) if result.weakly_compatible else []
        return PipelineResult(
            command="decompose",
            data=exporters.decomposition_to_dict(result, classes, self.config.decimal_digits),
            text=exporters.splits_to_text(result.system),
            summary=exporters.decomposition_summary(result, classes),
            artifact=result,
        )

    def check(self, parsed: ParsedInput) -> PipelineResult:
        system = self.system_of(parsed)
        ground = system.ground
        violation = find_weak_compatibility_violation(system)
        graph = system.incompatibility
        data: Dict[str, Any] = {
            "taxa": list(ground.labels),
            "splits": [system.describe(i) for i in range(len(system))],
            "weakly_compatible": violation is None,
            "violation": None,
            "incompatible_pairs": [list(e) for e in graph.edges],
            "components": [],
        }
        lines = [f"{len(system)} splits, {len(graph.components)} components"]
        if violation is not None:
            data["violation"] = {
                "splits": list(violation.splits),
                "taxa": [ground.label(x) for x in violation.taxa],
            }
            lines.append("weakly compatible: no")
            lines.append(violation.describe(system))
        else:
            lines.append("weakly compatible: yes")
            for component in classify_components(system):
                data["components"].append({
                    "splits": list(component.splits),
                    "class": component.kind.value,
                    "parts": [[ground.label(x) for x in sorted(part)] for part in component.parts],
                })
                lines.append(f"component {sorted(component.splits)}: {component.describe()}")
        text = "\n".join(lines) + "\n"
        return PipelineResult("check", data, text, text, artifact=system)

    def buneman(self, parsed: ParsedInput) -> PipelineResult:
        system = self.system_of(parsed)
        complex_: BunemanComplex = build_complex(system, max_splits=self.config.max_splits)
        summary = exporters.buneman_summary(complex_)
        return PipelineResult(
            command="buneman",
            data=exporters.buneman_to_dict(complex_),
            text=summary,
            summary=summary,
            dot=exporters.buneman_to_dot(complex_),
            artifact=complex_,
        )

    def tightspan(self, parsed: ParsedInput, drop_edge: Optional[int] = None) -> PipelineResult:
        complex_ = self._assemble(parsed, drop_edge)
        summary = exporters.tightspan_summary(complex_)
        return PipelineResult(
            command="tightspan",
            data=exporters.tightspan_to_dict(complex_, self.config.decimal_digits),
            text=summary,
            summary=summary,
            dot=exporters.tightspan_to_dot(complex_),
            artifact=complex_,
        )

    def verify(self, parsed: ParsedInput, drop_edge: Optional[int] = None) -> PipelineResult:
        n = parsed.ground.n
        if n > self.config.oracle_cap:
            raise SplitSpanError(
                f"{n} taxa exceed the oracle cap of {self.config.oracle_cap}; "
                f"raise it with --oracle-cap (values above 8 also need --force-oracle-cap)"
            )
        timings: Dict[str, Dict[str, float]] = {}
        with PhaseTimer("structural", timings):
            complex_ = self._assemble(parsed, drop_edge)
        comparator = TightSpanComparator(
            cap=self.config.oracle_cap, method=self.config.oracle_method, workers=self.config.workers
        )
        with PhaseTimer("oracle", timings):
            report = comparator.compare(complex_, complex_.metric)

        data = exporters.verification_to_dict(report, self.config.decimal_digits)
        data["timings"] = timings
        lines = [
            f"vertices match: {'yes' if report.vertices_match else 'no'}",
            f"edges match: {'yes' if report.edges_match else 'no'}",
            f"blocks: oracle {report.oracle_block_count}, structural {report.structural_block_count}",
            f"cell checks: {sum(c.ok for c in report.cell_checks)}/{len(report.cell_checks)} ok",
            "PASS" if report.passed else "FAIL",
        ]
        text = "\n".join(lines) + "\n"
        return PipelineResult("verify", data, text, text, ok=report.passed, artifact=report, timings=timings)

    # --- helpers -------------------------------------------------------------

    def _assemble(self, parsed: ParsedInput, drop_edge: Optional[int]) -> PolytopalComplex:
        system = self.system_of(parsed)
        complex_ = assemble(system, max_splits=self.config.max_splits)
        if parsed.metric is not None and parsed.metric != metric_of(system):
            logger.error("Decomposed system does not reproduce the input metric")
            raise SplitSpanError("decomposition does not reproduce the input metric")
        if drop_edge is not None:
            edges = complex_.cells_of_dim(1)
            if not 0 <= drop_edge < len(edges):
                raise SplitSpanError(f"cannot drop edge {drop_edge}; the complex has {len(edges)} edges")
            complex_ = drop_cell(complex_, edges[drop_edge].id)
        return complex_

    @staticmethod
    def _classes(system: WeightedSplitSystem) -> List[str]:
        return [c.describe() for c in classify_components(system)]
