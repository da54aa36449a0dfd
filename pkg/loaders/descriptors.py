"""
Matroid and weight file readers.

Supported inputs:
- JSON descriptors: {"type": "graphic" | "uniform" | "explicit" | "dual" |
  "truncate" | "minor" | "sum", ...}, nested through "of" and "parts"
- edge lists: one "u v [weight]" per line, '#' starts a comment
- weight files: "element weight" lines, or a JSON object element -> weight
- pmf files: JSON list of {"base": [elements], "mass": "p/q" or decimal}

Edge identifiers are "u-v"; repeated pairs get "u-v#2", "u-v#3", ...
"""

import io
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

import networkx as nx
import pandas as pd

from matroids.core import direct_sum, dual, graphic, minor, relabel, truncation, uniform
from matroids.distributions import MASS_TOLERANCE, BasePmf
from matroids.errors import InputError, ParseError
from matroids.ground import Element, GroundSet, format_fraction, to_fraction, weight_vector
from matroids.handles import ExplicitMatroid, GraphicMatroid, Matroid

from .demo import demo_graph, edge_list_text
from .hashing import compute_sha256, fingerprint_text

LOGGER = logging.getLogger(__name__)

PathLike = Union[str, Path]

EDGE_COLUMNS = ["u", "v", "weight"]
WEIGHT_COLUMNS = ["element", "weight"]


@dataclass
class LoadedInput:
    """A parsed input with its provenance."""

    matroid: Matroid
    source: str
    sha256: str
    loaded_at: str = field(default_factory=lambda: datetime.now().isoformat())
    weights: Optional[dict[Element, Fraction]] = None
    graph: Optional[nx.MultiGraph] = None
    styles: Optional[dict[str, str]] = None

    @property
    def is_graph(self) -> bool:
        return isinstance(self.matroid, GraphicMatroid)


def _read_text(path: Path) -> str:
    if not path.exists():
        raise FileNotFoundError(f"Input file not found: {path}")
    try:
        return path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"Not UTF-8 text: {e.reason}", path=str(path)) from e


def _data_lines(text: str) -> list[tuple[int, str]]:
    """(line number, content) for lines that are not blank after stripping comments."""
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        if content.strip():
            lines.append((number, content))
    return lines


def _column_of(content: str, token_index: int) -> int:
    """1-based column of the token_index-th whitespace-separated token."""
    position = 0
    for _ in range(token_index + 1):
        while content[position].isspace():
            position += 1
        start = position
        while position < len(content) and not content[position].isspace():
            position += 1
    return start + 1


def read_table(path: PathLike, columns: list[str], required: int) -> tuple[pd.DataFrame, list]:
    """
    Read a whitespace-separated table with '#' comments.

    Args:
        path: Text file
        columns: Column names; trailing columns past ``required`` are optional
        required: Number of mandatory columns

    Returns:
        (frame of str values with "" for absent optional cells, source line numbers per row)

    Raises:
        ParseError: On empty input or a row with the wrong number of fields
    """
    path = Path(path)
    text = _read_text(path)
    lines = _data_lines(text)
    if not lines:
        raise ParseError("No data rows", path=str(path))
    for number, content in lines:
        count = len(content.split())
        if count < required:
            raise ParseError(
                f"Expected at least {required} fields, found {count}",
                path=str(path),
                line=number,
                column=len(content.rstrip()) + 1,
            )
        if count > len(columns):
            raise ParseError(
                f"Expected at most {len(columns)} fields, found {count}",
                path=str(path),
                line=number,
                column=_column_of(content, len(columns)),
            )
    body = "\n".join(content for _, content in lines)
    try:
        df = pd.read_csv(
            io.StringIO(body),
            sep=r"\s+",
            header=None,
            names=columns,
            dtype=str,
            engine="python",
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ParseError(f"Malformed table: {e}", path=str(path)) from e
    df = df.fillna("")
    return df, [number for number, _ in lines]


def _parse_weight(value: str, path: Path, line: int, column: int) -> Fraction:
    try:
        weight = to_fraction(value, name="weight")
    except InputError as e:
        raise ParseError(str(e), path=str(path), line=line, column=column) from e
    if weight <= 0:
        raise ParseError(
            f"Weight must be positive, got {value}", path=str(path), line=line, column=column
        )
    return weight


def edge_ids(pairs: list[tuple[Any, Any]]) -> list[str]:
    """Identifiers "u-v" in input order, with "#k" on the k-th repeat of a pair."""
    seen: dict[str, int] = {}
    ids = []
    for u, v in pairs:
        key = f"{u}-{v}"
        seen[key] = seen.get(key, 0) + 1
        ids.append(key if seen[key] == 1 else f"{key}#{seen[key]}")
    return ids


def load_edge_list(path: PathLike) -> tuple[GraphicMatroid, Optional[dict[str, Fraction]]]:
    """
    Load a graph from an edge-list file.

    Args:
        path: Text file with "u v [weight]" rows

    Returns:
        (graphic matroid in file order, edge weights or None when no row has one)

    Raises:
        ParseError: On malformed rows, or when only some rows carry a weight
        DomainError: On a self-loop
    """
    path = Path(path)
    df, numbers = read_table(path, EDGE_COLUMNS, required=2)
    pairs = list(zip(df["u"], df["v"]))
    ids = edge_ids(pairs)
    matroid = graphic([(key, u, v) for key, (u, v) in zip(ids, pairs)])

    has_weight = df["weight"] != ""
    if not has_weight.any():
        return matroid, None
    if not has_weight.all():
        row = int((~has_weight).to_numpy().nonzero()[0][0])
        raise ParseError(
            "Either every edge or no edge may carry a weight",
            path=str(path),
            line=numbers[row],
        )
    weights = {}
    text_lines = path.read_text(encoding="utf-8").splitlines()
    for row, (key, value) in enumerate(zip(ids, df["weight"])):
        line = numbers[row]
        column = _column_of(text_lines[line - 1], 2)
        weights[key] = _parse_weight(value, path, line, column)
    LOGGER.info("Loaded %d weighted edges from %s", len(ids), path)
    return matroid, weights


def resolve_element(ground: GroundSet, ident: Any) -> Element:
    """
    Match an identifier read from a file to a ground element.

    Text files only carry strings, so "3" matches the element 3 when no
    element "3" exists.

    Raises:
        InputError: If nothing matches
    """
    if ident in ground:
        return ident
    text = str(ident)
    for element in ground:
        if str(element) == text:
            return element
    raise InputError(f"Unknown element {ident!r}")


def load_weights(path: PathLike, ground: GroundSet) -> dict[Element, Fraction]:
    """
    Load element weights for a ground set.

    Args:
        path: ".json" object element -> weight, or a two-column text table
        ground: Ground set the weights refer to

    Returns:
        Weights in ground order

    Raises:
        ParseError: On malformed input
        InputError: On unknown or missing elements
    """
    path = Path(path)
    weights: dict[Element, Fraction] = {}
    if path.suffix.lower() == ".json":
        data = _load_json(path)
        if not isinstance(data, dict):
            raise ParseError("Weight file must be a JSON object", path=str(path))
        for ident, value in data.items():
            try:
                weight = to_fraction(value, name=f"weight of {ident!r}")
            except InputError as e:
                raise ParseError(str(e), path=str(path)) from e
            if weight <= 0:
                raise ParseError(f"Weight of {ident!r} must be positive", path=str(path))
            weights[resolve_element(ground, ident)] = weight
    else:
        df, numbers = read_table(path, WEIGHT_COLUMNS, required=2)
        text_lines = path.read_text(encoding="utf-8").splitlines()
        for row, (ident, value) in enumerate(zip(df["element"], df["weight"])):
            line = numbers[row]
            try:
                element = resolve_element(ground, ident)
            except InputError as e:
                raise ParseError(str(e), path=str(path), line=line, column=1) from e
            if element in weights:
                raise ParseError(f"Duplicate weight for {ident!r}", path=str(path), line=line)
            weights[element] = _parse_weight(
                value, path, line, _column_of(text_lines[line - 1], 1)
            )
    missing = [e for e in ground if e not in weights]
    if missing:
        raise InputError(f"Weight file {path} has no weight for {missing[:5]!r}")
    return {e: weights[e] for e in ground}


def _load_json(path: Path) -> Any:
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path=str(path), line=e.lineno, column=e.colno) from e


def _require(node: dict, key: str, where: str, path: Path) -> Any:
    if key not in node:
        raise ParseError(f"{where}: missing key {key!r}", path=str(path))
    return node[key]


def _graphic_from_json(node: dict, where: str, path: Path) -> tuple[Matroid, dict]:
    raw_edges = _require(node, "edges", where, path)
    if not isinstance(raw_edges, list):
        raise ParseError(f"{where}.edges must be a list", path=str(path))
    declared = node.get("vertices", [])
    if isinstance(declared, int):
        vertices = list(range(declared))
        allowed = set(vertices)
    else:
        vertices = list(declared)
        allowed = None

    pairs, given_ids, weights = [], [], []
    for n, edge in enumerate(raw_edges):
        spot = f"{where}.edges[{n}]"
        if isinstance(edge, dict):
            u, v = _require(edge, "u", spot, path), _require(edge, "v", spot, path)
            given_ids.append(edge.get("id"))
            weights.append(edge.get("weight"))
        elif isinstance(edge, list) and len(edge) in (2, 3):
            u, v = edge[0], edge[1]
            given_ids.append(None)
            weights.append(edge[2] if len(edge) == 3 else None)
        else:
            raise ParseError(f"{spot} must be [u, v], [u, v, weight] or an object", path=str(path))
        if allowed is not None and (u not in allowed or v not in allowed):
            raise InputError(f"{spot} has an endpoint outside 0..{len(vertices) - 1}")
        pairs.append((u, v))

    generated = edge_ids(pairs)
    ids = [given if given is not None else key for given, key in zip(given_ids, generated)]
    matroid = graphic([(key, u, v) for key, (u, v) in zip(ids, pairs)], vertices=vertices)
    if all(w is None for w in weights):
        return matroid, {}
    if any(w is None for w in weights):
        raise ParseError(
            f"{where}: either every edge or no edge may carry a weight", path=str(path)
        )
    return matroid, {key: to_fraction(w, name=f"weight of {key!r}") for key, w in zip(ids, weights)}


def _build(node: Any, where: str, path: Path) -> tuple[Matroid, dict]:
    """Recursively build a handle and any weights embedded in graphic leaves."""
    if not isinstance(node, dict):
        raise ParseError(f"{where} must be an object", path=str(path))
    kind = _require(node, "type", where, path)
    weights: dict = {}

    if kind == "graphic":
        matroid, weights = _graphic_from_json(node, where, path)
    elif kind == "uniform":
        n, r = _require(node, "n", where, path), _require(node, "r", where, path)
        if not isinstance(n, int) or not isinstance(r, int):
            raise ParseError(f"{where}: n and r must be integers", path=str(path))
        matroid = uniform(n, r, node.get("elements"))
    elif kind == "explicit":
        matroid = ExplicitMatroid(
            _require(node, "ground", where, path), _require(node, "bases", where, path)
        )
    elif kind == "dual":
        inner, weights = _build(_require(node, "of", where, path), f"{where}.of", path)
        matroid = dual(inner)
    elif kind == "truncate":
        inner, weights = _build(_require(node, "of", where, path), f"{where}.of", path)
        t = _require(node, "t", where, path)
        if not isinstance(t, int):
            raise ParseError(f"{where}: t must be an integer", path=str(path))
        matroid = truncation(inner, t)
    elif kind == "minor":
        inner, weights = _build(_require(node, "of", where, path), f"{where}.of", path)
        ground = inner.ground
        delete = ground.mask(resolve_element(ground, e) for e in node.get("delete", []))
        contract = ground.mask(resolve_element(ground, e) for e in node.get("contract", []))
        if delete & contract:
            raise InputError(f"{where}: delete and contract overlap")
        matroid = minor(inner, delete=delete, contract=contract)
        weights = {e: w for e, w in weights.items() if e in matroid.ground}
    elif kind == "sum":
        parts = _require(node, "parts", where, path)
        if not isinstance(parts, list) or not parts:
            raise ParseError(f"{where}.parts must be a nonempty list", path=str(path))
        built = [_build(part, f"{where}.parts[{n}]", path) for n, part in enumerate(parts)]
        matroid = direct_sum([m for m, _ in built])
        for _, part_weights in built:
            weights.update(part_weights)
    else:
        raise ParseError(f"{where}: unknown matroid type {kind!r}", path=str(path))

    prefix = node.get("prefix")
    if prefix is not None:
        mapping = {e: f"{prefix}{e}" for e in matroid.ground}
        matroid = relabel(matroid, mapping)
        weights = {mapping[e]: w for e, w in weights.items()}
    return matroid, weights


def load_descriptor(path: PathLike) -> tuple[Matroid, Optional[dict[Element, Fraction]]]:
    """
    Load a JSON matroid descriptor.

    Args:
        path: JSON file

    Returns:
        (matroid handle, weights from a top-level "weights" object or graphic edges, or None)

    Raises:
        ParseError: On invalid JSON (with line and column) or a malformed node
        InputError: On bad parameters or identifier collisions
        DomainError: If the described matroid has a loop or rank 0

    Example:
        >>> m, _ = load_descriptor("tests/fixtures/k4.json")
        >>> m.full_rank
        3
    """
    path = Path(path)
    data = _load_json(path)
    matroid, weights = _build(data, "$", path)
    if isinstance(data, dict) and "weights" in data:
        top = data["weights"]
        if not isinstance(top, dict):
            raise ParseError("$.weights must be an object", path=str(path))
        weights = {resolve_element(matroid.ground, e): w for e, w in top.items()}
    if not weights:
        return matroid, None
    return matroid, weights


def load_input(
    path: Optional[PathLike] = None,
    demo: Optional[str] = None,
    weights_path: Optional[PathLike] = None,
) -> LoadedInput:
    """
    Load the matroid a command works on.

    Args:
        path: ".json" descriptor, anything else is read as an edge list
        demo: Name of a built-in demo graph, instead of ``path``
        weights_path: Optional weights file; overrides weights in the input

    Returns:
        LoadedInput with the handle, weights, graph and SHA256 fingerprint

    Raises:
        InputError: If neither or both of path and demo are given
        FileNotFoundError: If the input file does not exist
    """
    if (path is None) == (demo is None):
        raise InputError("Give exactly one of an input file or --demo")

    styles = None
    if demo is not None:
        graph, styles = demo_graph(demo)
        ends = {key: (u, v) for u, v, key in graph.edges(keys=True)}
        matroid: Matroid = graphic([(key, *ends[key]) for key in styles], vertices=graph.nodes)
        weights = None
        source = f"demo:{demo}"
        sha256 = fingerprint_text(edge_list_text(matroid.graph()))
    else:
        file_path = Path(path)
        if file_path.suffix.lower() == ".json":
            matroid, weights = load_descriptor(file_path)
        else:
            matroid, weights = load_edge_list(file_path)
        source = str(file_path)
        sha256 = compute_sha256(file_path)

    if weights is not None:
        weights = weight_vector(matroid.ground, weights)
    if weights_path is not None:
        weights = load_weights(weights_path, matroid.ground)

    graph = matroid.graph() if isinstance(matroid, GraphicMatroid) else None
    LOGGER.info("Loaded %s: %d elements, rank %d", source, matroid.size, matroid.full_rank)
    return LoadedInput(
        matroid=matroid,
        source=source,
        sha256=sha256,
        weights=weights,
        graph=graph,
        styles=styles,
    )


def load_pmf(path: PathLike, ground: GroundSet) -> BasePmf:
    """
    Load a base pmf.

    Masses written as decimals are rescaled to sum to exactly 1 when they are
    within MASS_TOLERANCE of it; "p/q" masses must sum to 1 exactly.

    Raises:
        ParseError: On malformed entries or masses that do not sum to 1
        InputError: On unknown elements
    """
    path = Path(path)
    data = _load_json(path)
    if not isinstance(data, list):
        raise ParseError("Pmf file must be a JSON list", path=str(path))
    masses: dict[int, Fraction] = {}
    decimal = False
    for n, entry in enumerate(data):
        spot = f"$[{n}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{spot} must be an object", path=str(path))
        base = _require(entry, "base", spot, path)
        if not isinstance(base, list):
            raise ParseError(f"{spot}.base must be a list", path=str(path))
        try:
            raw = _require(entry, "mass", spot, path)
            decimal = decimal or isinstance(raw, float) or (
                isinstance(raw, str) and any(c in raw for c in ".eE")
            )
            mass = to_fraction(raw, name=f"{spot}.mass")
        except InputError as e:
            raise ParseError(str(e), path=str(path)) from e
        mask = ground.mask(resolve_element(ground, e) for e in base)
        masses[mask] = masses.get(mask, Fraction(0)) + mass
    total = sum(masses.values(), Fraction(0))
    if decimal and total and abs(total - 1) <= MASS_TOLERANCE:
        masses = {mask: mass / total for mask, mass in masses.items()}
    elif total != 1:
        raise ParseError(f"Pmf masses sum to {format_fraction(total)}, not 1", path=str(path))
    return BasePmf(ground, masses)


def dump_pmf(pmf: BasePmf, path: PathLike) -> int:
    """
    Write a base pmf; rational masses as "p/q", float masses as decimals.

    Returns:
        Number of bases written
    """
    entries = []
    for base in sorted(pmf.masses):
        mass = pmf.masses[base]
        if isinstance(mass, (int, Fraction)):
            text = format_fraction(Fraction(mass))
        else:
            text = repr(float(mass))
        entries.append({"base": pmf.ground.members(base), "mass": text})
    with open(path, "w", encoding="utf-8") as f:
        json.dump(entries, f, indent=2)
        f.write("\n")
    LOGGER.info("Wrote %d bases to %s", len(entries), path)
    return len(entries)
