"""
Tests for the report-building services behind the CLI.
"""

from fractions import Fraction

import pytest

from app.config import Settings
from app.services.analysis import analyze_input, removal_report, spectrum_report
from app.services.verification import generate_verification_report, run_verification
from loaders.descriptors import load_input
from matroids.errors import CapacityError, InputError


@pytest.fixture
def settings():
    return Settings()


class TestAnalysis:
    def test_strict_homogeneity_of_a_sum(self, fixtures_dir, settings):
        report = analyze_input(load_input(fixtures_dir / "sum.json"), settings, strict=True)
        strict = report["strict"]
        assert strict["strictly_homogeneous"]
        assert not strict["connected"]
        assert [c["theta"] for c in strict["components"]] == [3, 3]
        assert report["homogeneous"]

    def test_partition_rows(self, fixtures_dir, settings):
        report = analyze_input(load_input(fixtures_dir / "triangle_bridge.txt"), settings)
        assert [(p["level"], p["size"], p["nested_size"]) for p in report["partition"]] == [
            (Fraction(2, 3), 3, 4),
            (Fraction(1), 1, 1),
        ]
        assert report["strength_set"] == ["3-4"]

    def test_spectrum_groups_by_block(self, fixtures_dir, settings):
        report, _ = spectrum_report(load_input(fixtures_dir / "triangle_bridge.txt"), settings)
        assert list(report["ranges"][0]["cells"]) == ["block 1 (2/3)", "block 2 (1)"]
        assert [p["c"] for p in report["breakpoints"]] == [2, 3]

    def test_removal_witness(self, fixtures_dir, settings):
        report = removal_report(load_input(fixtures_dir / "doubled_triangle.txt"), settings, 2)
        assert report["n_value"] == 4
        assert report["full_packing"]


class TestVerification:
    def test_weighted_input_skips_unweighted_checks(self, fixtures_dir, settings):
        loaded = load_input(fixtures_dir / "weighted_triangle.txt")
        report = run_verification(loaded, settings, only=["removal", "spectrum", "lexicographic"])
        assert report["status"] == "warnings"
        assert [c["status"] for c in report["checks"]] == ["skipped", "skipped", "pass"]

    def test_unknown_check(self, fixtures_dir, settings):
        with pytest.raises(InputError):
            run_verification(load_input(fixtures_dir / "k4.json"), settings, only=["magic"])

    def test_demo_fingerprint(self, three_wheels, settings):
        report = run_verification(
            three_wheels,
            settings,
            only=["lexicographic"],
            expect_sha256=three_wheels.sha256.upper(),
        )
        assert report["checks"][0] == {"check": "fingerprint", "status": "pass"}

    def test_every_check_over_capacity(self, fixtures_dir):
        loaded = load_input(fixtures_dir / "k4.json")
        with pytest.raises(CapacityError):
            run_verification(loaded, Settings(oracle_limit=5), only=["min_2norm"])

    def test_fingerprint_error_outranks_capacity(self, fixtures_dir):
        loaded = load_input(fixtures_dir / "k4.json")
        report = run_verification(
            loaded, Settings(oracle_limit=5), only=["min_2norm"], expect_sha256="0" * 64
        )
        assert report["status"] == "errors"
        assert [c["status"] for c in report["checks"]] == ["fail", "skipped"]

    def test_report_status(self):
        warning = {"type": "skipped", "severity": "warning", "check": "x", "issue": "-"}
        error = dict(warning, severity="error")
        assert generate_verification_report([])["status"] == "pass"
        assert generate_verification_report([warning])["status"] == "warnings"
        assert generate_verification_report([warning, error])["error_count"] == 1
