"""
Tests for base pmfs: product weights, maximum entropy, min-det, strict
homogeneity, truncation averaging and the matching decomposition.
"""

import logging
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matroids.core import direct_sum, enumerate_bases, graphic, uniform
from matroids.distributions import BasePmf
from matroids.errors import DomainError, InputError
from matroids.pmf import (
    MatchingTerm,
    is_strictly_homogeneous,
    lambda_pmf,
    lambda_recover,
    max_entropy_pmf,
    min_det_solve,
    normalize_lambda,
    rank1_union_decompose,
    recompose,
    truncation_pmf,
)
from tests.strategies import graphic_matroids

THIRD = Fraction(1, 3)


class TestLambdaPmf:
    def test_weighted_triangle(self, k3):
        pmf, usage = lambda_pmf(k3, {"e1": 1, "e2": 1, "e3": 2})
        assert sorted(pmf.masses.values()) == [Fraction(1, 5), Fraction(2, 5), Fraction(2, 5)]
        assert usage == {"e1": Fraction(3, 5), "e2": Fraction(3, 5), "e3": Fraction(4, 5)}

    def test_float_weights(self, k3):
        _, usage = lambda_pmf(k3, {"e1": 1.0, "e2": 1.0, "e3": 2.0})
        assert usage["e3"] == pytest.approx(0.8)

    def test_rejects_nonpositive(self, k3):
        with pytest.raises(InputError):
            lambda_pmf(k3, {"e1": 1, "e2": 0, "e3": 1})

    def test_normalize(self):
        lam = normalize_lambda({"a": 2.0, "b": 8.0}, {"a": 1, "b": 1})
        assert lam["a"] * lam["b"] == pytest.approx(1.0)
        assert lam["b"] / lam["a"] == pytest.approx(4.0)


class TestRecovery:
    def test_round_trip_on_triangle(self, k3):
        _, usage = lambda_pmf(k3, {"e1": 1, "e2": 1, "e3": 2})
        lam = lambda_recover(k3, usage)
        assert lam["e1"] == pytest.approx(1.0, rel=1e-7)
        assert lam["e2"] == pytest.approx(1.0, rel=1e-7)
        assert lam["e3"] == pytest.approx(2.0, rel=1e-7)

    def test_uniform_density_gives_unit_weights(self, k3):
        lam = lambda_recover(k3, {e: Fraction(2, 3) for e in k3.ground})
        assert all(value == pytest.approx(1.0, rel=1e-7) for value in lam.values())

    def test_zero_entry_excludes_bases(self, k3):
        with pytest.raises(DomainError):
            lambda_recover(k3, {"e1": 1, "e2": 0, "e3": 1})

    @settings(max_examples=15, deadline=None)
    @given(graphic_matroids(max_vertices=4, max_edges=6), st.data())
    def test_round_trip_random(self, M, data):
        lam = {e: Fraction(data.draw(st.integers(min_value=1, max_value=4))) for e in M.ground}
        _, usage = lambda_pmf(M, lam)
        recovered = lambda_recover(M, usage)
        pmf, _ = lambda_pmf(M, recovered)
        original, _ = lambda_pmf(M, lam)
        for base, mass in original.masses.items():
            assert pmf.masses[base] == pytest.approx(float(mass), rel=1e-6)


class TestMaxEntropy:
    def test_symmetric_point_is_uniform(self, k4):
        result = max_entropy_pmf(k4, {e: Fraction(1, 2) for e in k4.ground})
        assert result.entropy == pytest.approx(math.log(16))
        assert len(result.support) == 16

    def test_induces_target(self, k3):
        beta = {"e1": Fraction(3, 5), "e2": Fraction(3, 5), "e3": Fraction(4, 5)}
        usage = max_entropy_pmf(k3, beta).pmf.usage()
        for e in k3.ground:
            assert usage[e] == pytest.approx(float(beta[e]), abs=1e-10)

    def test_single_supporting_base(self, k3):
        result = max_entropy_pmf(k3, {"e1": 1, "e2": 0, "e3": 1})
        assert result.entropy == 0.0
        assert result.support == (0b101,)

    def test_outside_polytope(self, k3):
        with pytest.raises(DomainError) as excinfo:
            max_entropy_pmf(k3, {"e1": 1, "e2": 1, "e3": 1})
        assert excinfo.value.certificate["kind"] == "sum differs from rank"


class TestMinDet:
    def test_homogeneous_is_attained(self, k4):
        result = min_det_solve(k4)
        assert not result.boundary
        assert result.value == pytest.approx(16.0, rel=1e-7)
        assert all(v == pytest.approx(1.0, rel=1e-6) for v in result.lam.values())

    def test_value_is_exp_of_max_entropy(self, caplog):
        # K4 minus an edge: homogeneous, but its max-entropy pmf is not uniform
        M = graphic([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
        beta = {e: Fraction(3, 5) for e in M.ground}
        with caplog.at_level(logging.WARNING, logger="matroids.pmf"):
            result = min_det_solve(M)
        assert not result.boundary
        assert not caplog.records
        entropy = max_entropy_pmf(M, beta).entropy
        assert result.entropy == pytest.approx(entropy, abs=1e-12)
        assert result.value == pytest.approx(math.exp(entropy), rel=1e-7)
        assert result.value < len(enumerate_bases(M))
        _, usage = lambda_pmf(M, result.lam)
        assert all(u == pytest.approx(0.6, abs=1e-7) for u in usage.values())

    def test_coloop_forces_boundary(self, triangle_bridge):
        result = min_det_solve(triangle_bridge)
        assert result.boundary
        assert result.lam is None
        assert result.vanishing == ("e4",)
        assert result.value == 0.0


class TestStrictHomogeneity:
    def test_complete_graph(self, k4):
        report = is_strictly_homogeneous(k4)
        assert report.strictly_homogeneous and report.connected
        assert report.supports_all_bases

    def test_triangle_plus_bridge(self, triangle_bridge):
        report = is_strictly_homogeneous(triangle_bridge)
        assert not report.strictly_homogeneous
        assert report.witness is not None

    def test_components_with_equal_density(self, two_u21):
        report = is_strictly_homogeneous(two_u21)
        assert report.strictly_homogeneous
        assert not report.connected
        assert not report.criterion
        assert len(report.components) == 2
        assert report.supports_all_bases

    def test_components_with_different_density(self):
        M = direct_sum([uniform(1, 1, ["a"]), uniform(2, 1, ["b1", "b2"])])
        assert not is_strictly_homogeneous(M).strictly_homogeneous


class TestBasePmf:
    def test_exact_masses_must_sum_to_one(self, k3):
        bases = enumerate_bases(k3)
        with pytest.raises(InputError):
            BasePmf(k3.ground, {bases[0]: THIRD, bases[1]: THIRD})

    def test_float_masses_within_tolerance(self, k3):
        bases = enumerate_bases(k3)
        pmf = BasePmf(k3.ground, {bases[0]: 0.5 + 1e-9, bases[1]: 0.5})
        assert pmf.total == pytest.approx(1.0)
        with pytest.raises(InputError):
            BasePmf(k3.ground, {bases[0]: 0.5, bases[1]: 0.4})

    def test_empty_pmf(self, k3):
        with pytest.raises(InputError):
            BasePmf(k3.ground, {})


class TestTruncationPmf:
    def test_uniform_pmf_spreads_evenly(self, k4):
        bases = enumerate_bases(k4)
        pmf = BasePmf(k4.ground, {b: Fraction(1, len(bases)) for b in bases})
        usage = truncation_pmf(k4, pmf, 2).usage()
        assert set(usage.values()) == {THIRD}

    def test_level_out_of_range(self, k4):
        pmf = BasePmf(k4.ground, {enumerate_bases(k4)[0]: Fraction(1)})
        with pytest.raises(InputError):
            truncation_pmf(k4, pmf, 4)


@st.composite
def doubly_balanced(draw):
    """Random convex combinations of uniform matching pmfs, as exact matrices."""
    n = draw(st.integers(min_value=2, max_value=6))
    count = draw(st.integers(min_value=1, max_value=4))
    perms = [tuple(draw(st.permutations(range(n)))) for _ in range(count)]
    raw = [draw(st.integers(min_value=1, max_value=9)) for _ in range(count)]
    total = sum(raw)
    terms = [MatchingTerm(Fraction(w, total), p) for w, p in zip(raw, perms)]
    return n, recompose(terms, n)


class TestMatchingDecomposition:
    def test_two_by_two(self):
        terms = rank1_union_decompose([[0.3, 0.2], [0.2, 0.3]])
        assert [(t.coefficient, t.permutation) for t in terms] == [
            (Fraction(2, 5), (1, 0)),
            (Fraction(3, 5), (0, 1)),
        ]

    def test_already_a_matching(self):
        terms = rank1_union_decompose([[Fraction(1, 2), 0], [0, Fraction(1, 2)]])
        assert [(t.coefficient, t.permutation) for t in terms] == [(Fraction(1), (0, 1))]

    def test_uniform_three_by_three(self):
        u = [[Fraction(1, 9)] * 3 for _ in range(3)]
        terms = rank1_union_decompose(u)
        assert sum(t.coefficient for t in terms) == 1
        assert recompose(terms, 3) == u

    def test_bad_marginals(self):
        with pytest.raises(InputError):
            rank1_union_decompose([[0.5, 0.1], [0.0, 0.4]])

    def test_not_square(self):
        with pytest.raises(InputError):
            rank1_union_decompose([[0.5, 0.5]])

    @settings(max_examples=100, deadline=None)
    @given(doubly_balanced())
    def test_recomposes_exactly(self, instance):
        n, u = instance
        terms = rank1_union_decompose(u)
        assert len(terms) <= n * n
        assert all(t.coefficient > 0 for t in terms)
        assert sum(t.coefficient for t in terms) == 1
        assert recompose(terms, n) == u
