"""
Tests for input loading: edge lists, descriptors, weights, pmfs, demos and fingerprints.
"""

import json
from fractions import Fraction

import pytest

from loaders.demo import DASHED, DOTTED, SOLID, demo_graph, edge_list_text, three_wheels
from loaders.descriptors import (
    dump_pmf,
    edge_ids,
    load_descriptor,
    load_edge_list,
    load_input,
    load_pmf,
    load_weights,
    read_table,
    resolve_element,
)
from loaders.hashing import compute_sha256, fingerprint_text, verify_fingerprint
from matroids.core import enumerate_bases, uniform
from matroids.distributions import BasePmf
from matroids.errors import DomainError, InputError, ParseError


class TestEdgeLists:
    def test_triangle_plus_bridge(self, fixtures_dir):
        M, weights = load_edge_list(fixtures_dir / "triangle_bridge.txt")
        assert M.ground.elements == ("1-2", "2-3", "1-3", "3-4")
        assert M.full_rank == 3
        assert weights is None

    def test_repeated_pairs(self, fixtures_dir):
        M, _ = load_edge_list(fixtures_dir / "doubled_triangle.txt")
        assert M.ground.elements == ("1-2", "1-2#2", "2-3", "2-3#2", "1-3", "1-3#2")

    def test_weight_column(self, fixtures_dir):
        _, weights = load_edge_list(fixtures_dir / "weighted_triangle.txt")
        assert weights == {"1-2": 1, "2-3": 1, "1-3": 2}

    def test_extra_field_position(self, fixtures_dir):
        with pytest.raises(ParseError) as excinfo:
            load_edge_list(fixtures_dir / "bad_fields.txt")
        assert (excinfo.value.line, excinfo.value.column) == (2, 7)
        assert ":2:7:" in str(excinfo.value)

    def test_some_rows_weighted(self, fixtures_dir):
        with pytest.raises(ParseError) as excinfo:
            load_edge_list(fixtures_dir / "mixed_weights.txt")
        assert excinfo.value.line == 2

    def test_missing_field(self, tmp_path):
        path = tmp_path / "short.txt"
        path.write_text("1 2\n\n# comment\n3\n")
        with pytest.raises(ParseError) as excinfo:
            load_edge_list(path)
        assert (excinfo.value.line, excinfo.value.column) == (4, 2)

    def test_bad_weight(self, tmp_path):
        path = tmp_path / "weights.txt"
        path.write_text("1 2 one\n")
        with pytest.raises(ParseError) as excinfo:
            load_edge_list(path)
        assert (excinfo.value.line, excinfo.value.column) == (1, 5)

    def test_self_loop(self, tmp_path):
        path = tmp_path / "loop.txt"
        path.write_text("1 2\n2 2\n")
        with pytest.raises(DomainError):
            load_edge_list(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("# nothing here\n")
        with pytest.raises(ParseError):
            load_edge_list(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_edge_list(tmp_path / "absent.txt")

    def test_read_table_keeps_line_numbers(self, fixtures_dir):
        df, numbers = read_table(fixtures_dir / "triangle_bridge.txt", ["u", "v", "weight"], 2)
        assert numbers == [2, 3, 4, 5]
        assert list(df["weight"]) == ["", "", "", ""]

    def test_edge_ids(self):
        assert edge_ids([("a", "b"), ("a", "b"), ("b", "a")]) == ["a-b", "a-b#2", "b-a"]


class TestDescriptors:
    def test_k4(self, fixtures_dir):
        M, weights = load_descriptor(fixtures_dir / "k4.json")
        assert (M.size, M.full_rank) == (6, 3)
        assert len(enumerate_bases(M)) == 16
        assert weights is None

    def test_sum_with_prefix_and_weights(self, fixtures_dir):
        M, weights = load_descriptor(fixtures_dir / "sum.json")
        assert M.ground.elements == ("x", "y", "z", "g:ab", "g:bc", "g:ac")
        assert M.full_rank == 3
        assert weights["g:ac"] == "2"

    def test_invalid_json_position(self, fixtures_dir):
        with pytest.raises(ParseError) as excinfo:
            load_descriptor(fixtures_dir / "bad.json")
        assert excinfo.value.line == 2
        assert excinfo.value.column is not None

    def test_nested_operations(self, tmp_path):
        descriptor = {
            "type": "minor",
            "of": {"type": "dual", "of": {"type": "uniform", "n": 5, "r": 2}},
            "delete": [0],
            "contract": [1],
        }
        path = tmp_path / "minor.json"
        path.write_text(json.dumps(descriptor))
        M, _ = load_descriptor(path)
        assert M.size == 3
        assert M.full_rank == 2

    def test_truncate(self, tmp_path):
        path = tmp_path / "t.json"
        descriptor = {"type": "truncate", "t": 2, "of": {"type": "uniform", "n": 4, "r": 3}}
        path.write_text(json.dumps(descriptor))
        M, _ = load_descriptor(path)
        assert M.full_rank == 2

    def test_explicit(self, tmp_path):
        path = tmp_path / "explicit.json"
        descriptor = {
            "type": "explicit",
            "ground": ["a", "b", "c"],
            "bases": [["a", "b"], ["a", "c"]],
        }
        path.write_text(json.dumps(descriptor))
        M, _ = load_descriptor(path)
        assert M.coloops() == 0b001

    def test_unknown_type(self, tmp_path):
        path = tmp_path / "odd.json"
        path.write_text(json.dumps({"type": "transversal"}))
        with pytest.raises(ParseError):
            load_descriptor(path)

    def test_overlapping_minor(self, tmp_path):
        path = tmp_path / "overlap.json"
        descriptor = {
            "type": "minor",
            "of": {"type": "uniform", "n": 3, "r": 1},
            "delete": [0],
            "contract": [0],
        }
        path.write_text(json.dumps(descriptor))
        with pytest.raises(InputError):
            load_descriptor(path)

    def test_vertex_count_bounds(self, tmp_path):
        path = tmp_path / "bounds.json"
        path.write_text(json.dumps({"type": "graphic", "vertices": 2, "edges": [[0, 2]]}))
        with pytest.raises(InputError):
            load_descriptor(path)


class TestWeights:
    @pytest.mark.parametrize("name", ["triangle_weights.txt", "triangle_weights.json"])
    def test_both_formats(self, fixtures_dir, name):
        M, _ = load_edge_list(fixtures_dir / "triangle.txt")
        weights = load_weights(fixtures_dir / name, M.ground)
        assert weights == {"1-2": 1, "2-3": 1, "1-3": 2}

    def test_missing_element(self, fixtures_dir, tmp_path):
        M, _ = load_edge_list(fixtures_dir / "triangle.txt")
        path = tmp_path / "partial.txt"
        path.write_text("1-2 1\n")
        with pytest.raises(InputError):
            load_weights(path, M.ground)

    def test_unknown_element(self, fixtures_dir, tmp_path):
        M, _ = load_edge_list(fixtures_dir / "triangle.txt")
        path = tmp_path / "unknown.txt"
        path.write_text("1-2 1\n9-9 1\n")
        with pytest.raises(ParseError) as excinfo:
            load_weights(path, M.ground)
        assert excinfo.value.line == 2

    def test_nonpositive(self, fixtures_dir, tmp_path):
        M, _ = load_edge_list(fixtures_dir / "triangle.txt")
        path = tmp_path / "zero.json"
        path.write_text(json.dumps({"1-2": 0, "2-3": 1, "1-3": 1}))
        with pytest.raises(ParseError):
            load_weights(path, M.ground)

    def test_resolve_by_text(self, k4):
        assert resolve_element(uniform(3, 1).ground, "2") == 2
        assert resolve_element(k4.ground, "e2") == "e2"
        with pytest.raises(InputError):
            resolve_element(k4.ground, "nope")


class TestLoadInput:
    def test_edge_list_with_weight_file(self, fixtures_dir):
        loaded = load_input(
            fixtures_dir / "triangle.txt", weights_path=fixtures_dir / "triangle_weights.txt"
        )
        assert loaded.weights == {"1-2": 1, "2-3": 1, "1-3": 2}
        assert loaded.is_graph
        assert loaded.graph.number_of_edges() == 3
        assert loaded.sha256 == compute_sha256(fixtures_dir / "triangle.txt")

    def test_descriptor_weights_are_normalized(self, fixtures_dir):
        loaded = load_input(fixtures_dir / "sum.json")
        assert loaded.weights["g:ac"] == Fraction(2)
        assert not loaded.is_graph
        assert loaded.graph is None

    def test_needs_exactly_one_source(self, fixtures_dir):
        with pytest.raises(InputError):
            load_input()
        with pytest.raises(InputError):
            load_input(fixtures_dir / "k4.json", demo="three-wheels")

    def test_demo(self, three_wheels):
        M = three_wheels.matroid
        assert (M.size, M.full_rank, len(M.vertices)) == (84, 35, 36)
        assert three_wheels.source == "demo:three-wheels"
        assert three_wheels.sha256 == fingerprint_text(edge_list_text(M.graph()))
        assert list(M.ground) == list(three_wheels.styles)


class TestDemo:
    def test_style_counts(self):
        graph, styles = three_wheels()
        counts = {style: list(styles.values()).count(style) for style in (SOLID, DASHED, DOTTED)}
        assert counts == {SOLID: 45, DASHED: 36, DOTTED: 3}
        assert graph.number_of_nodes() == 36

    def test_figure1_alias(self):
        graph, styles = demo_graph("figure1")
        assert graph.number_of_edges() == 84
        assert list(styles.values()).count(DOTTED) == 3

    def test_unknown_demo(self):
        with pytest.raises(InputError):
            demo_graph("two-wheels")


class TestPmfFiles:
    def test_round_trip_exact(self, k3, tmp_path):
        bases = enumerate_bases(k3)
        pmf = BasePmf(k3.ground, {b: Fraction(1, 3) for b in bases})
        path = tmp_path / "pmf.json"
        assert dump_pmf(pmf, path) == 3
        assert json.loads(path.read_text())[0]["mass"] == "1/3"
        assert load_pmf(path, k3.ground).masses == pmf.masses

    def test_float_masses_written_as_decimals(self, k3, tmp_path):
        bases = enumerate_bases(k3)
        pmf = BasePmf(k3.ground, {bases[0]: 0.25, bases[1]: 0.75})
        path = tmp_path / "pmf.json"
        dump_pmf(pmf, path)
        assert load_pmf(path, k3.ground).masses[bases[1]] == Fraction(3, 4)

    def test_masses_must_sum_to_one(self, k3, tmp_path):
        bases = [k3.ground.members(b) for b in enumerate_bases(k3)]
        path = tmp_path / "pmf.json"
        path.write_text(json.dumps([{"base": b, "mass": "1/3"} for b in bases[:2]]))
        with pytest.raises(ParseError):
            load_pmf(path, k3.ground)

    def test_decimal_masses_are_rescaled(self, k3, tmp_path):
        bases = [k3.ground.members(b) for b in enumerate_bases(k3)]
        entries = [{"base": b, "mass": "0.3333333333"} for b in bases]
        path = tmp_path / "pmf.json"
        path.write_text(json.dumps(entries))
        pmf = load_pmf(path, k3.ground)
        assert pmf.total == 1
        assert set(pmf.masses.values()) == {Fraction(1, 3)}

    def test_not_a_list(self, k3, tmp_path):
        path = tmp_path / "pmf.json"
        path.write_text("{}")
        with pytest.raises(ParseError):
            load_pmf(path, k3.ground)


class TestFingerprints:
    def test_file_and_text_agree(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("1 2\n")
        digest = compute_sha256(path)
        assert digest == fingerprint_text("1 2\n")
        assert verify_fingerprint(path, digest.upper())

    def test_rejects_malformed_hash(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("1 2\n")
        with pytest.raises(ValueError):
            verify_fingerprint(path, "abc")

    def test_directory(self, tmp_path):
        with pytest.raises(ValueError):
            compute_sha256(tmp_path)
