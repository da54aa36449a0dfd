"""
Shared fixtures: standard small matroids and the three-wheels demo.
"""

from itertools import combinations
from pathlib import Path

import pytest

from loaders.descriptors import load_input
from matroids.core import direct_sum, graphic, uniform

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def k3():
    """Triangle: edges e1=(1,2), e2=(2,3), e3=(1,3)."""
    return graphic([(1, 2), (2, 3), (1, 3)])


@pytest.fixture
def k4():
    """Complete graph on 4 vertices; edges e1..e6 in lexicographic vertex order."""
    return graphic(list(combinations(range(4), 2)))


@pytest.fixture
def triangle_bridge():
    """Triangle e1, e2, e3 on vertices 1, 2, 3 plus the bridge e4 = (3, 4)."""
    return graphic([(1, 2), (2, 3), (1, 3), (3, 4)])


@pytest.fixture
def u42():
    return uniform(4, 2)


@pytest.fixture
def two_u21():
    return direct_sum([uniform(2, 1, ["a1", "a2"]), uniform(2, 1, ["b1", "b2"])])


@pytest.fixture
def doubled_triangle():
    """Triangle with every edge doubled: e1, e2 on (1,2), e3, e4 on (2,3), e5, e6 on (1,3)."""
    return graphic([(1, 2), (1, 2), (2, 3), (2, 3), (1, 3), (1, 3)])


@pytest.fixture(scope="session")
def three_wheels():
    """The built-in three-wheels demo as a LoadedInput (84 edges, rank 35)."""
    return load_input(demo="three-wheels")
