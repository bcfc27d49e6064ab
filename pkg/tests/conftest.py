import random

import pytest

from code.splitspan.splits import WeightedSplitSystem
from code.splitspan.workloads import SplitSystemGenerator


@pytest.fixture
def octahedral():
    return SplitSystemGenerator.octahedral()


@pytest.fixture
def circular3():
    return SplitSystemGenerator.circular(3)


@pytest.fixture
def quartet():
    """Quartet tree ab|cd with four pendant edges, all of length 1."""
    return WeightedSplitSystem.from_labelled(
        ["a", "b", "c", "d"],
        [(["a"], 1), (["b"], 1), (["c"], 1), (["d"], 1), (["a", "b"], 1)],
    )


@pytest.fixture
def glued():
    return SplitSystemGenerator.glued()


@pytest.fixture
def composite():
    return SplitSystemGenerator.composite()


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def pentagon():
    """All arcs of a 5-cycle: five pendant edges and one consistent block."""
    return SplitSystemGenerator.full_circular(5)


@pytest.fixture
def hexagon():
    return SplitSystemGenerator.full_circular(6)
