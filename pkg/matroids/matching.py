"""
Bipartite perfect matching with a Hall-violator certificate on failure.
"""

import logging
from collections import deque
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass
from typing import Optional

import networkx as nx
from networkx.algorithms import bipartite

from .errors import InputError

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchingResult:
    """Either a perfect ``matching`` (left -> right) or a Hall ``violator`` S ⊆ L."""

    matching: Optional[dict] = None
    violator: Optional[frozenset] = None
    neighbours: Optional[frozenset] = None

    @property
    def perfect(self) -> bool:
        return self.violator is None


def _hall_violator(
    adjacency: dict, pair_left: dict, pair_right: dict
) -> tuple[frozenset, frozenset]:
    """Left vertices reachable by alternating paths from the unmatched ones, and N(S)."""
    queue = deque(u for u in adjacency if u not in pair_left)
    seen_left = set(queue)
    seen_right = set()
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v in seen_right:
                continue
            seen_right.add(v)
            w = pair_right.get(v)
            if w is not None and w not in seen_left:
                seen_left.add(w)
                queue.append(w)
    return frozenset(seen_left), frozenset(seen_right)


def bipartite_perfect_matching(
    left: Sequence[Hashable],
    right: Sequence[Hashable],
    edges: Iterable[tuple[Hashable, Hashable]],
) -> MatchingResult:
    """
    Hopcroft-Karp on a bipartite multigraph.

    Parallel edges are allowed and count once. Vertices and edges are visited
    in the given order, so results are deterministic.

    Args:
        left: Left vertices
        right: Right vertices, as many as on the left
        edges: (left, right) pairs

    Returns:
        MatchingResult with the matching, or S with |N(S)| < |S|

    Raises:
        InputError: If the sides differ in size or an edge has an unknown endpoint
    """
    left, right = list(left), list(right)
    if len(left) != len(right):
        raise InputError(f"Sides differ in size: {len(left)} and {len(right)}")
    left_set, right_set = set(left), set(right)
    adjacency: dict = {u: [] for u in left}
    G = nx.Graph()
    G.add_nodes_from(("L", u) for u in left)
    G.add_nodes_from(("R", v) for v in right)
    for u, v in edges:
        if u not in left_set or v not in right_set:
            raise InputError(f"Edge ({u!r}, {v!r}) has an endpoint outside the bipartition")
        if v not in adjacency[u]:
            adjacency[u].append(v)
            G.add_edge(("L", u), ("R", v))

    raw = bipartite.hopcroft_karp_matching(G, top_nodes=[("L", u) for u in left])
    pair_left = {u[1]: v[1] for u, v in raw.items() if u[0] == "L"}
    if len(pair_left) == len(left):
        return MatchingResult(matching={u: pair_left[u] for u in left})
    pair_right = {v: u for u, v in pair_left.items()}
    violator, neighbours = _hall_violator(adjacency, pair_left, pair_right)
    LOGGER.debug("No perfect matching: |S|=%d, |N(S)|=%d", len(violator), len(neighbours))
    return MatchingResult(violator=violator, neighbours=neighbours)
