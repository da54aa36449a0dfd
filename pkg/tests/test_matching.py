"""
Tests for bipartite perfect matching and Hall-violator certificates.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matroids.errors import InputError
from matroids.matching import bipartite_perfect_matching


def bounded_degree_instance(n: int, moves: int, rng: random.Random) -> list[tuple[int, int]]:
    """n^2 edges with every degree at most n + 1: n random permutations, then endpoint moves."""
    edges = []
    for _ in range(n):
        perm = list(range(n))
        rng.shuffle(perm)
        edges.extend(enumerate(perm))
    degree = {side: [n] * n for side in (0, 1)}
    for _ in range(moves):
        k = rng.randrange(len(edges))
        side = rng.randrange(2)
        target = rng.randrange(n)
        if degree[side][target] >= n + 1:
            continue
        edge = list(edges[k])
        degree[side][edge[side]] -= 1
        degree[side][target] += 1
        edge[side] = target
        edges[k] = tuple(edge)
    return edges


def assert_perfect(result, edges, n):
    assert result.perfect
    assert sorted(result.matching) == list(range(n))
    assert sorted(result.matching.values()) == list(range(n))
    edge_set = set(edges)
    assert all((u, v) in edge_set for u, v in result.matching.items())


class TestPerfectMatching:
    def test_complete_bipartite(self):
        n = 4
        edges = [(i, j) for i in range(n) for j in range(n)]
        assert_perfect(bipartite_perfect_matching(range(n), range(n), edges), edges, n)

    def test_parallel_edges(self):
        edges = [(0, 1), (0, 1), (1, 0)]
        result = bipartite_perfect_matching([0, 1], [0, 1], edges)
        assert result.matching == {0: 1, 1: 0}

    def test_star_has_violator(self):
        edges = [(i, "a") for i in range(3)]
        result = bipartite_perfect_matching([0, 1, 2], ["a", "b", "c"], edges)
        assert not result.perfect
        assert result.violator == frozenset({0, 1, 2})
        assert result.neighbours == frozenset({"a"})

    def test_violator_obeys_hall_bound(self):
        edges = [(0, "x"), (1, "x"), (2, "y"), (2, "z")]
        result = bipartite_perfect_matching([0, 1, 2], ["x", "y", "z"], edges)
        assert len(result.neighbours) < len(result.violator)
        assert result.violator == frozenset({0, 1})

    def test_unequal_sides(self):
        with pytest.raises(InputError):
            bipartite_perfect_matching([0, 1], [0], [(0, 0)])

    def test_unknown_endpoint(self):
        with pytest.raises(InputError):
            bipartite_perfect_matching([0], [0], [(0, 5)])

    @settings(max_examples=1000, deadline=None)
    @given(
        st.integers(min_value=2, max_value=8),
        st.integers(min_value=0, max_value=200),
        st.integers(min_value=0, max_value=2**32),
    )
    def test_degree_bound_forces_perfect_matching(self, n, moves, seed):
        edges = bounded_degree_instance(n, moves, random.Random(seed))
        assert len(edges) == n * n
        assert_perfect(bipartite_perfect_matching(range(n), range(n), edges), edges, n)
