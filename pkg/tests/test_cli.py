"""
Tests for the density-cli commands, output formats and exit codes.
"""

import json

import pytest
from click.testing import CliRunner

from app.cli import EXIT_CAPACITY, EXIT_DOMAIN, EXIT_INPUT, EXIT_MISMATCH, cli
from loaders.hashing import compute_sha256


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture
def path17(tmp_path):
    """A path with 17 edges: 2^17 edge subsets."""
    path = tmp_path / "path17.txt"
    path.write_text("".join(f"{i} {i + 1}\n" for i in range(17)))
    return path


def run(runner, *args):
    return runner.invoke(cli, [str(a) for a in args])


class TestVersion:
    def test_version(self, runner):
        result = run(runner, "version")
        assert result.exit_code == 0
        assert "Version: 0.1.0" in result.stdout
        assert "Python: " in result.stdout


class TestAnalyze:
    def test_json_report(self, runner, fixtures_dir):
        path = fixtures_dir / "triangle_bridge.txt"
        result = run(runner, "analyze", path, "--format", "json")
        assert result.exit_code == 0, result.stderr
        report = json.loads(result.stdout)
        assert report["strength"] == "1"
        assert report["arboricity"] == "3/2"
        assert [row["eta"] for row in report["density"]] == ["2/3", "2/3", "2/3", "1"]
        assert report["provenance"]["sha256"] == compute_sha256(path)

    def test_csv_schema_line(self, runner, fixtures_dir):
        result = run(runner, "analyze", fixtures_dir / "k4.json", "--format", "csv")
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0] == "# schema=density version=1"
        assert lines[1] == "element,eta,block"
        assert lines[2] == "e1,1/2,1"

    def test_table_mentions_homogeneity(self, runner, fixtures_dir):
        result = run(runner, "analyze", fixtures_dir / "k4.json", "--strict")
        assert result.exit_code == 0
        assert "Homogeneous: yes" in result.stdout
        assert "Strictly homogeneous: yes" in result.stdout

    def test_weight_file(self, runner, fixtures_dir):
        result = run(
            runner,
            "analyze",
            fixtures_dir / "triangle.txt",
            "--weights",
            fixtures_dir / "triangle_weights.json",
            "--format",
            "json",
        )
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert [row["eta"] for row in report["density"]] == ["1/2", "1/2", "1"]
        assert report["weighted"] is True

    @pytest.mark.parametrize("name", ["three-wheels", "figure1"])
    def test_demo_level_counts(self, runner, name):
        result = run(runner, "analyze", "--demo", name, "--format", "json", "--compact")
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["level_counts"] == [
            {"level": "1/3", "count": 45},
            {"level": "1/2", "count": 36},
            {"level": "2/3", "count": 3},
        ]

    def test_output_file(self, runner, fixtures_dir, tmp_path):
        target = tmp_path / "report.json"
        result = run(
            runner, "analyze", fixtures_dir / "k4.json", "--format", "json", "--output", target
        )
        assert result.exit_code == 0
        assert "Output written to" in result.stderr
        assert json.loads(target.read_text())["rank"] == 3


class TestExitCodes:
    def test_missing_file(self, runner, tmp_path):
        result = run(runner, "analyze", tmp_path / "absent.txt")
        assert result.exit_code == EXIT_INPUT
        assert "Error:" in result.stderr

    def test_parse_error_location(self, runner, fixtures_dir):
        result = run(runner, "analyze", fixtures_dir / "bad_fields.txt")
        assert result.exit_code == EXIT_INPUT
        assert ":2:7:" in result.stderr

    def test_no_input(self, runner):
        assert run(runner, "analyze").exit_code == EXIT_INPUT

    def test_self_loop_is_domain_error(self, runner, tmp_path):
        path = tmp_path / "loop.txt"
        path.write_text("1 2\n1 1\n")
        assert run(runner, "analyze", path).exit_code == EXIT_DOMAIN

    def test_capacity_hint(self, runner, path17):
        result = run(runner, "nk", path17, "-k", "1", "--oracle")
        assert result.exit_code == EXIT_CAPACITY
        assert "--oracle-limit" in result.stderr

    def test_bad_environment(self, runner):
        result = runner.invoke(cli, ["version"], env={"MATROID_ORACLE_LIMIT": "lots"})
        assert result.exit_code == EXIT_INPUT
        assert "MATROID_ORACLE_LIMIT" in result.stderr

    def test_spectrum_rejects_weights(self, runner, fixtures_dir):
        result = run(runner, "spectrum", fixtures_dir / "weighted_triangle.txt")
        assert result.exit_code == EXIT_INPUT

    def test_addable_needs_graph(self, runner, fixtures_dir):
        result = run(runner, "addable", fixtures_dir / "sum.json", "-k", "2")
        assert result.exit_code == EXIT_INPUT


class TestSpectrum:
    def test_long_csv(self, runner, fixtures_dir):
        result = run(runner, "spectrum", fixtures_dir / "triangle_bridge.txt", "--format", "csv")
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0] == "# schema=spectrum version=1"
        assert lines[1] == "t,element,value_num,value_den"
        assert lines[2] == "1,1-2,1,4"
        assert len(lines) == 2 + 16

    def test_matrix_json(self, runner, fixtures_dir):
        result = run(runner, "spectrum", fixtures_dir / "k4.json", "--matrix", "--format", "json")
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["balancity"] == 3
        assert report["rows"][0] == {"t": 1, **{f"e{i}": "1/6" for i in range(1, 7)}}

    def test_demo_ranges(self, runner):
        result = run(runner, "spectrum", "--demo", "three-wheels", "--ranges", "--format", "csv")
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[1] == "t_from,t_to,solid,dashed,dotted"
        assert lines[2] == "1,28,t/84,t/84,t/84"
        assert lines[3] == "29,34,1/3,(t - 15)/39,(t - 15)/39"
        assert lines[7] == "56,84,t/84,t/84,t/84"


class TestOtherCommands:
    def test_mkl_with_certificates(self, runner, fixtures_dir, tmp_path):
        pmf_path = tmp_path / "pmf.json"
        result = run(
            runner,
            "mkl",
            fixtures_dir / "k4.json",
            "--certify",
            "--format",
            "json",
            "--pmf-output",
            pmf_path,
        )
        assert result.exit_code == 0, result.stderr
        report = json.loads(result.stdout)
        assert report["converged"]
        assert report["certificates"]["entropy_bound"]["tight"]
        assert report["certificates"]["distance_to_exact"] < 1e-6
        assert json.loads(pmf_path.read_text())

    def test_removal_with_oracle(self, runner, fixtures_dir):
        result = run(runner, "nk", fixtures_dir / "k4.json", "-k", "1", "--oracle")
        assert result.exit_code == 0
        assert "N(M, 1) = 3" in result.stdout
        assert "Oracle: 3" in result.stdout

    def test_removal_rejects_weights(self, runner, fixtures_dir):
        result = run(runner, "nk", fixtures_dir / "weighted_triangle.txt", "-k", "1")
        assert result.exit_code == EXIT_INPUT

    def test_addable_homogeneous(self, runner, fixtures_dir):
        result = run(runner, "addable", fixtures_dir / "k4.json", "-k", "2")
        assert result.exit_code == 0
        assert "Case: homogeneous-tight" in result.stdout
        assert "Addable: 0  Blocked: 6" in result.stdout

    def test_toughness_json(self, runner, fixtures_dir):
        result = run(
            runner, "toughness", fixtures_dir / "k4.json", "-c", "1", "--oracle", "--format", "json"
        )
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["toughness"] == "2"
        assert report["oracle"]["agrees"] is True


class TestVerify:
    CHECKS = ["min_2norm", "lexicographic", "principal_partition", "duality", "removal", "spectrum"]

    def checks(self):
        args = []
        for name in self.CHECKS:
            args += ["--check", name]
        return args

    def test_passes_on_triangle_plus_bridge(self, runner, fixtures_dir):
        result = run(runner, "verify", fixtures_dir / "triangle_bridge.txt", *self.checks())
        assert result.exit_code == 0, result.stdout
        assert "All verification checks passed" in result.stderr

    def test_fingerprint_mismatch(self, runner, fixtures_dir):
        result = run(
            runner,
            "verify",
            fixtures_dir / "k4.json",
            "--check",
            "lexicographic",
            "--expect-sha256",
            "0" * 64,
        )
        assert result.exit_code == EXIT_MISMATCH
        assert "✗" in result.stderr

    def test_capacity_becomes_warning(self, runner, fixtures_dir):
        result = run(
            runner,
            "verify",
            fixtures_dir / "k4.json",
            "--check",
            "min_2norm",
            "--check",
            "lexicographic",
            "--oracle-limit",
            "5",
            "--format",
            "json",
        )
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["status"] == "warnings"
        assert report["checks"] == [
            {"check": "min_2norm", "status": "skipped"},
            {"check": "lexicographic", "status": "pass"},
        ]

    def test_every_check_over_capacity(self, runner, fixtures_dir, path17):
        result = run(runner, "verify", path17, "--check", "removal", "--oracle-limit", "1000")
        assert result.exit_code == EXIT_CAPACITY
        assert "--oracle-limit" in result.stderr

        k4 = fixtures_dir / "k4.json"
        result = run(runner, "verify", k4, "--check", "min_2norm", "--oracle-limit", "5")
        assert result.exit_code == EXIT_CAPACITY

    def test_unknown_check(self, runner, fixtures_dir):
        result = run(runner, "verify", fixtures_dir / "k4.json", "--check", "everything")
        assert result.exit_code == 2
