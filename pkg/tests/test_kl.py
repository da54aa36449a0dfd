"""
Tests for the MKL solver and its optimality certificates.
"""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matroids.core import contraction, uniform
from matroids.errors import DomainError, InputError
from matroids.kl import (
    gibbs_bound,
    length_certificate,
    mkl_gradient,
    mkl_objective,
    mkl_solve,
    serial_rule_check,
    vmax_core_check,
)
from matroids.universal import universal_density
from tests.strategies import small_matroids, weights_for


class TestObjective:
    def test_value_and_gradient(self):
        eta = {"a": 0.5, "b": 0.25}
        assert mkl_objective(eta) == pytest.approx(math.log(2) + math.log(4))
        assert mkl_gradient(eta, {"a": 1, "b": 2}) == {"a": -2.0, "b": -8.0}

    def test_zero_entry_is_infinite(self):
        assert mkl_objective({"a": 0, "b": 1}) == math.inf

    def test_negative_entry(self):
        with pytest.raises(InputError):
            mkl_objective({"a": -0.1})


class TestSolver:
    def test_triangle_plus_bridge(self, triangle_bridge):
        solution = mkl_solve(triangle_bridge)
        assert solution.converged
        assert solution.value == pytest.approx(3 * math.log(1.5), abs=1e-8)
        assert solution.density["e4"] == pytest.approx(1.0, abs=1e-7)
        assert solution.pmf.total == pytest.approx(1.0)

    def test_weighted_triangle(self, k3):
        solution = mkl_solve(k3, {"e1": 1, "e2": 1, "e3": 2})
        assert solution.density["e1"] == pytest.approx(0.5, abs=1e-7)
        assert solution.density["e3"] == pytest.approx(1.0, abs=1e-7)

    def test_rejects_loops(self, k3):
        with pytest.raises(DomainError):
            mkl_solve(contraction(k3, 0b011, allow_loops=True))

    def test_rejects_bad_tolerance(self, k3):
        with pytest.raises(InputError):
            mkl_solve(k3, tol=0)

    def test_iteration_cap_reports_unconverged(self, k4):
        solution = mkl_solve(k4, tol=1e-300, max_iter=3)
        assert not solution.converged
        assert solution.iterations == 3

    @settings(max_examples=200, deadline=None)
    @given(small_matroids())
    def test_agrees_with_universal_density(self, M):
        eta, _ = universal_density(M)
        solution = mkl_solve(M)
        for e in M.ground:
            assert solution.density[e] == pytest.approx(float(eta[e]), abs=1e-7)

    @settings(max_examples=50, deadline=None)
    @given(small_matroids(), st.data())
    def test_agrees_with_weighted_universal_density(self, M, data):
        sigma = data.draw(weights_for(M))
        eta, _ = universal_density(M, sigma)
        assert length_certificate(M, eta, sigma)["passed"]
        solution = mkl_solve(M, sigma)
        for e in M.ground:
            assert solution.density[e] == pytest.approx(float(eta[e]), abs=1e-7)


class TestCertificates:
    def test_length_certificate_exact(self, triangle_bridge):
        eta, _ = universal_density(triangle_bridge)
        report = length_certificate(triangle_bridge, eta)
        assert report["passed"]
        assert report["max_length"] == 4

    def test_length_certificate_rejects_flat_vector(self, triangle_bridge):
        flat = {e: Fraction(3, 4) for e in triangle_bridge.ground}
        assert not length_certificate(triangle_bridge, flat)["passed"]

    def test_vmax_core(self, triangle_bridge):
        eta, _ = universal_density(triangle_bridge)
        report = vmax_core_check(triangle_bridge, eta)
        assert report["passed"]
        assert report["v_max"] == Fraction(3, 2)
        assert list(report["v_max_set"]) == ["e1", "e2", "e3"]

    def test_vmax_core_with_float_density(self, triangle_bridge):
        solution = mkl_solve(triangle_bridge)
        assert vmax_core_check(triangle_bridge, solution.density)["passed"]

    def test_gibbs_bound_tight_on_homogeneous(self, k4):
        report = gibbs_bound(k4)
        assert report["homogeneous"] and report["tight"]
        assert report["bound"] == pytest.approx(6 * math.log(2))
        assert report["passed"]

    def test_gibbs_bound_strict_otherwise(self, triangle_bridge):
        report = gibbs_bound(triangle_bridge)
        assert not report["homogeneous"]
        assert not report["tight"]
        assert report["passed"]

    def test_serial_rule(self, k3):
        parts = [(uniform(3, 1, ["a1", "a2", "a3"]), None), (k3, None)]
        report = serial_rule_check(parts)
        assert report["passed"]
        assert report["value_sum"] == pytest.approx(3 * math.log(3) + 3 * math.log(1.5))
        assert report["product_pmf"]["bases_valid"]

    def test_serial_rule_needs_parts(self):
        with pytest.raises(InputError):
            serial_rule_check([])
