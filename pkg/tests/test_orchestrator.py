import json

import pytest

from code.splitspan.config import Config
from code.splitspan.errors import CapacityError, SplitSpanError
from code.splitspan.formats.exporters import matrix_to_text, splits_to_text
from code.splitspan.kappa import metric_of
from code.splitspan.orchestrator import Orchestrator
from code.splitspan.workloads import SplitSystemGenerator


@pytest.fixture
def orchestrator():
    return Orchestrator()


@pytest.fixture
def octahedral_text(octahedral):
    return splits_to_text(octahedral)


@pytest.fixture
def octahedral_matrix(octahedral):
    return matrix_to_text(metric_of(octahedral))


def test_load_from_text_and_file(orchestrator, octahedral_text, tmp_path):
    from_text = orchestrator.load(text=octahedral_text)
    path = tmp_path / "octa.splits"
    path.write_text(octahedral_text)
    assert orchestrator.load(path=str(path)).system == from_text.system
    with pytest.raises(SplitSpanError, match="no input"):
        orchestrator.load()


def test_system_of_matrix_decomposes(orchestrator, octahedral, octahedral_matrix):
    parsed = orchestrator.load(text=octahedral_matrix)
    assert orchestrator.system_of(parsed) == octahedral


def test_system_of_rejects_residual(orchestrator):
    parsed = orchestrator.load(text=matrix_to_text(SplitSystemGenerator.k23_metric()))
    with pytest.raises(SplitSpanError, match="not totally split-decomposable"):
        orchestrator.system_of(parsed)


def test_decompose(orchestrator, octahedral_matrix, octahedral_text):
    result = orchestrator.decompose(orchestrator.load(text=octahedral_matrix))
    assert result.text == octahedral_text
    assert "totally split-decomposable: yes" in result.summary
    assert result.data["component_classes"] == ["octahedral"]
    with pytest.raises(SplitSpanError):
        result.render("dot")


def test_decompose_with_decimals(octahedral_matrix):
    orchestrator = Orchestrator(Config(decimal_digits=3))
    data = orchestrator.decompose(orchestrator.load(text=octahedral_matrix)).data
    assert [s["weight_decimal"] for s in data["splits"]] == ["1.000"] * 4
    assert data["residual_decimal"][0] == ["0.000"] * 6


def test_decompose_needs_matrix(orchestrator, octahedral_text):
    with pytest.raises(SplitSpanError, match="distance matrix"):
        orchestrator.decompose(orchestrator.load(text=octahedral_text))


def test_check_weakly_compatible(orchestrator, glued):
    result = orchestrator.check(orchestrator.load(text=splits_to_text(glued)))
    assert result.data["weakly_compatible"] is True
    assert {c["class"] for c in result.data["components"]} == {"octahedral", "strictly_circular"}
    assert "weakly compatible: yes" in result.text


def test_check_reports_violation(orchestrator, octahedral_text):
    text = octahedral_text + "1 : 1,4\n"
    result = orchestrator.check(orchestrator.load(text=text))
    assert result.data["weakly_compatible"] is False
    assert len(result.data["violation"]["taxa"]) == 4
    assert result.data["components"] == []
    assert "weakly compatible: no" in result.text


def test_buneman(orchestrator, octahedral_text):
    result = orchestrator.buneman(orchestrator.load(text=octahedral_text))
    assert result.summary.startswith("Buneman complex: 16V/32E")
    assert "graph buneman" in result.render("dot").replace('"', "")
    assert json.loads(result.render("json"))["blocks"][0]["class"] == "octahedral"


def test_tightspan(orchestrator, octahedral_text):
    result = orchestrator.tightspan(orchestrator.load(text=octahedral_text))
    assert result.summary.startswith("1 block: rhombic dodecahedron (14V/24E/12F)")
    assert result.render("text") == result.summary


def test_tightspan_from_matrix_checks_metric(orchestrator, octahedral_matrix):
    result = orchestrator.tightspan(orchestrator.load(text=octahedral_matrix))
    assert len(result.artifact.vertices) == 14


def test_verify_passes(orchestrator, octahedral_text):
    result = orchestrator.verify(orchestrator.load(text=octahedral_text))
    assert result.ok
    assert result.text.splitlines()[-1] == "PASS"
    assert set(result.timings) == {"structural", "oracle"}
    assert result.data["passed"] is True


def test_verify_detects_dropped_edge(orchestrator, octahedral_text):
    result = orchestrator.verify(orchestrator.load(text=octahedral_text), drop_edge=3)
    assert not result.ok
    assert "edges match: no" in result.text
    assert result.text.splitlines()[-1] == "FAIL"


def test_verify_with_decimals_and_basis_oracle():
    orchestrator = Orchestrator(Config(decimal_digits=2, oracle_method="basis"))
    parsed = orchestrator.load(text=splits_to_text(SplitSystemGenerator.circular(2)))
    result = orchestrator.verify(parsed, drop_edge=0)
    assert not result.ok
    (edge,) = result.data["missing_edges_decimal"]
    assert all("." in v for end in edge for v in end)
    assert result.data["missing_vertices_decimal"] == []


def test_drop_edge_out_of_range(orchestrator, octahedral_text):
    with pytest.raises(SplitSpanError, match="cannot drop edge"):
        orchestrator.tightspan(orchestrator.load(text=octahedral_text), drop_edge=24)


def test_verify_respects_oracle_cap(glued):
    orchestrator = Orchestrator(Config())
    with pytest.raises(SplitSpanError, match="--oracle-cap"):
        orchestrator.verify(orchestrator.load(text=splits_to_text(glued)))


def test_config_validation():
    with pytest.raises(CapacityError, match="force-oracle-cap"):
        Config(oracle_cap=10)
    assert Config(oracle_cap=10, allow_large_oracle=True).oracle_cap == 10
    with pytest.raises(ValueError):
        Config(output_format="svg")
    with pytest.raises(ValueError):
        Config(input_kind="newick")
    with pytest.raises(ValueError):
        Config(workers=0)
    with pytest.raises(ValueError):
        Config(oracle_method="simplex")
