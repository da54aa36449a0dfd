"""
Built-in demo graphs.

``three-wheels`` is three copies of a wheel-like block (an inner K6 on G..L,
an outer 6-cycle on A..F and the spokes A-G, ..., F-L) joined by three
connector edges. Its principal partition has three levels, which makes it
the reference instance for the analysis and spectrum commands.
"""

import logging
from itertools import combinations

import networkx as nx

from matroids.errors import InputError

LOGGER = logging.getLogger(__name__)

INNER = "GHIJKL"
OUTER = "ABCDEF"
CONNECTORS = (("C0", "F1"), ("B0", "E2"), ("D2", "A1"))

SOLID = "solid"
DASHED = "dashed"
DOTTED = "dotted"


def _add(graph: nx.MultiGraph, styles: dict, u: str, v: str, style: str) -> None:
    key = f"{u}-{v}"
    graph.add_edge(u, v, key=key)
    styles[key] = style


def three_wheels() -> tuple[nx.MultiGraph, dict[str, str]]:
    """
    The three-block demo graph: 36 vertices, 84 edges, cycle-matroid rank 35.

    Returns:
        (graph, styles) where styles maps each edge key to solid, dashed or dotted

    Example:
        >>> graph, styles = three_wheels()
        >>> graph.number_of_edges(), sum(s == "solid" for s in styles.values())
        (84, 45)
    """
    graph = nx.MultiGraph()
    styles: dict[str, str] = {}
    for block in range(3):
        graph.add_nodes_from(f"{x}{block}" for x in OUTER + INNER)
        for u, v in combinations(INNER, 2):
            _add(graph, styles, f"{u}{block}", f"{v}{block}", SOLID)
        for i, u in enumerate(OUTER):
            v = OUTER[(i + 1) % len(OUTER)]
            _add(graph, styles, f"{u}{block}", f"{v}{block}", DASHED)
        for u, v in zip(OUTER, INNER):
            _add(graph, styles, f"{u}{block}", f"{v}{block}", DASHED)
    for u, v in CONNECTORS:
        _add(graph, styles, u, v, DOTTED)
    LOGGER.debug(
        "Built three-wheels: %d vertices, %d edges",
        graph.number_of_nodes(),
        graph.number_of_edges(),
    )
    return graph, styles


DEMOS = {"three-wheels": three_wheels, "figure1": three_wheels}


def demo_graph(name: str) -> tuple[nx.MultiGraph, dict[str, str]]:
    """
    Build a named demo graph.

    Raises:
        InputError: If the name is unknown
    """
    try:
        builder = DEMOS[name]
    except KeyError:
        raise InputError(f"Unknown demo {name!r}; available: {', '.join(sorted(DEMOS))}") from None
    return builder()


def edge_list_text(graph: nx.MultiGraph) -> str:
    """Edge-list rendering in the loader's text format, one "u v" per line."""
    return "".join(f"{u} {v}\n" for u, v, _ in graph.edges(keys=True))
