"""
Tests for the truncation spectrum, balancity and the spectrum consistency check.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from app.services.analysis import spectrum_groups
from matroids.core import truncation
from matroids import spectrum
from matroids.errors import InputError
from matroids.spectrum import (
    balancity,
    dual_truncation_arboricity,
    spectrum_consistency_check,
    truncation_spectrum,
)
from matroids.universal import universal_density
from tests.strategies import small_matroids


@pytest.fixture(scope="module")
def wheels_table(three_wheels):
    return truncation_spectrum(three_wheels.matroid)


class TestThreeWheels:
    def test_breakpoints(self, wheels_table):
        assert [p.c for p in wheels_table.breakpoints] == [28, 34, 35]
        assert [p.c for p in wheels_table.dual_breakpoints] == [28, 41, 49]
        assert wheels_table.balancity == 28
        assert (wheels_table.size, wheels_table.rank) == (84, 35)

    def test_levels(self, wheels_table):
        assert wheels_table.partition.levels == (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3))

    def test_ranges_by_style(self, three_wheels, wheels_table):
        rows = wheels_table.ranges(spectrum_groups(three_wheels, wheels_table))
        table = [
            (row["t_from"], row["t_to"], row["cells"]["solid"], row["cells"]["dashed"],
             row["cells"]["dotted"])
            for row in rows
        ]
        assert table == [
            (1, 28, "t/84", "t/84", "t/84"),
            (29, 34, "1/3", "(t - 15)/39", "(t - 15)/39"),
            (35, 35, "1/3", "1/2", "2/3"),
            (36, 42, "(t - 20)/45", "1/2", "2/3"),
            (43, 55, "(t - 2)/81", "(t - 2)/81", "2/3"),
            (56, 84, "t/84", "t/84", "t/84"),
        ]

    def test_density_values(self, three_wheels, wheels_table):
        styles = three_wheels.styles
        at_30 = wheels_table.density(30)
        assert {at_30[e] for e in at_30 if styles[e] == "dotted"} == {Fraction(15, 39)}
        at_50 = wheels_table.density(50)
        assert {at_50[e] for e in at_50 if styles[e] == "solid"} == {Fraction(48, 81)}
        for t in (1, 29, 35, 36, 43, 84):
            assert sum(wheels_table.density(t).values()) == t


class TestSmallSpectra:
    def test_triangle_plus_bridge(self, triangle_bridge):
        table = truncation_spectrum(triangle_bridge)
        assert table.balancity == 2
        assert balancity(triangle_bridge) == 2
        assert set(table.density(1).values()) == {Fraction(1, 4)}
        assert table.density(3) == universal_density(triangle_bridge)[0]
        assert set(table.density(4).values()) == {Fraction(1)}

    def test_agrees_with_truncation_handles(self, triangle_bridge):
        table = truncation_spectrum(triangle_bridge)
        for t in range(1, triangle_bridge.size + 1):
            direct, _ = universal_density(truncation(triangle_bridge, t))
            assert table.density(t) == direct

    def test_level_out_of_range(self, k3):
        with pytest.raises(InputError):
            truncation_spectrum(k3).density(4)

    def test_matrix_covers_every_level(self, k4):
        matrix = truncation_spectrum(k4).matrix()
        assert sorted(matrix) == list(range(1, 7))

    def test_balancity_of_homogeneous(self, k4):
        assert balancity(k4) == 3

    def test_dual_truncation_arboricity(self, k4):
        assert dual_truncation_arboricity(k4, 4) == Fraction(3, 2)
        with pytest.raises(InputError):
            dual_truncation_arboricity(k4, 6)

    def test_consistency_on_triangle_plus_bridge(self, triangle_bridge):
        report = spectrum_consistency_check(triangle_bridge)
        assert report["passed"], report["failures"]
        assert report["checked"] > 0

    def test_density_sequence_read_from_truncation_handles(self, k4, monkeypatch):
        def short_truncation(M, t):
            return truncation(M, 1 if M is k4 and t == 2 else t)

        monkeypatch.setattr(spectrum, "truncation", short_truncation)
        report = spectrum_consistency_check(k4, compare_oracle=False)
        assert not report["passed"]
        assert "density decreases" in {f["check"] for f in report["failures"]}

    @settings(max_examples=50, deadline=None)
    @given(small_matroids())
    def test_consistency_on_random_matroids(self, M):
        report = spectrum_consistency_check(M)
        assert report["passed"], report["failures"]

    @settings(max_examples=25, deadline=None)
    @given(small_matroids())
    def test_densities_sum_to_level(self, M):
        table = truncation_spectrum(M)
        for t in range(1, M.size + 1):
            values = table.density(t).values()
            assert sum(values) == t
            assert all(0 < v <= 1 for v in values)
