"""
Applied questions answered by the principal partition.

- the removal number N(M, k): the largest restriction coverable by k bases
- the addable edges E_k(G): pairs whose new edge keeps a(G) = k
- c-order edge toughness as the strength of a truncation
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Union

import networkx as nx

from .core import minor, restriction, truncation
from .density import fractional_arboricity, strength
from .errors import CapacityError, InputError
from .ground import Mask, iter_bits
from .handles import GraphicMatroid, Matroid
from .sfm import DEFAULT_EXHAUSTIVE_LIMIT
from .union import base_packing, matroid_partition
from .universal import is_homogeneous, universal_density

LOGGER = logging.getLogger(__name__)

DEFAULT_SUBSET_LIMIT = 1 << 16


@dataclass(frozen=True)
class RemovalAnswer:
    """
    N(M, k) with a witness restriction.

    ``i_of_k`` is the 1-based level index (None when a(M) <= k and the answer
    is E itself); ``packing_ok`` is False if the k disjoint bases of M|S could
    not be found, which would indicate a fault.
    """

    k: int
    n_value: int
    witness: Mask
    i_of_k: Optional[int]
    s_set: Mask
    packing_ok: bool = True


@dataclass(frozen=True)
class AddableEdgeReport:
    case: str
    k: int
    arboricity: Fraction
    addable: tuple = ()
    blocked: tuple = ()
    witnesses: tuple = field(default=())


def cover_number(M: Matroid) -> Union[int, float]:
    """a(M) = ceil(D(M)); infinite with loops, 0 for rank 0 without loops."""
    if M.loops():
        return math.inf
    if M.full_rank == 0:
        return 0
    return math.ceil(fractional_arboricity(M)[0])


def removal_number(
    M: Matroid, k: int, exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT
) -> RemovalAnswer:
    """
    N(M, k) = |E - S| + k r(S), S = {e : eta*(e) <= s_i} for the largest level s_i <= 1/k.

    The witness is E - S together with k disjoint bases of M|S.

    Example:
        >>> removal_number(graphic_k4, 1).n_value
        3

    Raises:
        InputError: If k < 1
        DomainError: If M has loops or rank 0
    """
    if k < 1:
        raise InputError(f"k must be positive, got {k}")
    d_value, _ = fractional_arboricity(M, exhaustive_limit=exhaustive_limit)
    if d_value <= k:
        return RemovalAnswer(k=k, n_value=M.size, witness=M.full, i_of_k=None, s_set=0)
    _, partition = universal_density(M, exhaustive_limit=exhaustive_limit)
    threshold = Fraction(1, k)
    i_of_k = max(i for i, level in enumerate(partition.levels, start=1) if level <= threshold)
    s_set = 0
    for block in partition.blocks[:i_of_k]:
        s_set |= block
    outside = M.full & ~s_set
    n_value = outside.bit_count() + k * M._rank(s_set)

    sub = restriction(M, s_set)
    packing = base_packing(sub, k)
    packed = 0
    if packing.ok:
        for base in packing.bases:
            packed |= sub.ground.translate(base, M.ground)
    else:
        LOGGER.error("No %d disjoint bases on the level set; witness is incomplete", k)
    return RemovalAnswer(
        k=k,
        n_value=n_value,
        witness=outside | packed,
        i_of_k=i_of_k,
        s_set=s_set,
        packing_ok=packing.ok,
    )


def _coverable(M: Matroid, X: Mask, k: int) -> bool:
    sub = restriction(M, X)
    if X.bit_count() > k * sub.full_rank:
        return False
    return not matroid_partition(sub, k).uncovered


def removal_oracle(M: Matroid, k: int, limit: int = DEFAULT_SUBSET_LIMIT) -> int:
    """
    Largest |X| with a(M|X) <= k, by scanning subsets from the largest size down.

    Raises:
        CapacityError: If 2^|E| exceeds ``limit``
    """
    if k < 1:
        raise InputError(f"k must be positive, got {k}")
    if 1 << M.size > limit:
        raise CapacityError(
            "Too many subsets for the removal oracle", limit=limit, partial=1 << M.size
        )
    for size in range(M.size, 0, -1):
        for combo in combinations(range(M.size), size):
            X = 0
            for i in combo:
                X |= 1 << i
            if _coverable(M, X, k):
                return size
    return 0


def _require_connected(G: GraphicMatroid) -> nx.MultiGraph:
    graph = G.graph()
    if not nx.is_connected(graph):
        raise InputError("Graph must be connected")
    return graph


def addable_edges(
    G: GraphicMatroid, k: int, exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT
) -> AddableEdgeReport:
    """
    Classify every vertex pair by whether a new edge there keeps a(G) = k.

    - D(G) < k: every pair is addable
    - D(G) = k and G homogeneous: no pair is addable
    - otherwise a pair is blocked exactly when both ends lie in one connected
      component of the core, whose vertex-induced subgraph attains D(G)

    Raises:
        InputError: If k < 2, a(G) != k or G is disconnected
    """
    if k < 2:
        raise InputError(f"k must be at least 2, got {k}")
    _require_connected(G)
    d_value, core = fractional_arboricity(G, exhaustive_limit=exhaustive_limit)
    if math.ceil(d_value) != k:
        raise InputError(f"Graph has arboricity {math.ceil(d_value)}, not {k}")
    pairs = list(combinations(G.vertices, 2))

    if d_value < k:
        return AddableEdgeReport(case="below", k=k, arboricity=d_value, addable=tuple(pairs))
    if is_homogeneous(G, exhaustive_limit=exhaustive_limit):
        everything = tuple(G.vertices)
        return AddableEdgeReport(
            case="homogeneous-tight",
            k=k,
            arboricity=d_value,
            blocked=tuple((pair, everything) for pair in pairs),
            witnesses=(everything,),
        )

    order = {v: i for i, v in enumerate(G.vertices)}
    core_graph = nx.MultiGraph()
    for i in iter_bits(core):
        core_graph.add_edge(*G.endpoints(G.ground.elements[i]))
    parts = (sorted(part, key=order.__getitem__) for part in nx.connected_components(core_graph))
    witnesses = sorted((tuple(part) for part in parts), key=lambda part: order[part[0]])
    home = {v: part for part in witnesses for v in part}
    addable, blocked = [], []
    for u, v in pairs:
        part = home.get(u)
        if part is not None and home.get(v) is part:
            blocked.append(((u, v), part))
        else:
            addable.append((u, v))
    LOGGER.info("%d addable and %d blocked pairs", len(addable), len(blocked))
    return AddableEdgeReport(
        case="partitioned",
        k=k,
        arboricity=d_value,
        addable=tuple(addable),
        blocked=tuple(blocked),
        witnesses=tuple(witnesses),
    )


def edge_toughness(
    G: GraphicMatroid, c: int, exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT
) -> Fraction:
    """
    tau_c(G) = min |X| / (omega(G - X) - c), read as the strength of the
    (|V| - c)-truncation of the cycle matroid.

    Raises:
        InputError: If c is outside [1, |V| - 1] or G is disconnected
    """
    _require_connected(G)
    n_vertices = len(G.vertices)
    if not 1 <= c <= n_vertices - 1:
        raise InputError(f"c must lie in [1, {n_vertices - 1}], got {c}")
    return strength(truncation(G, n_vertices - c), exhaustive_limit=exhaustive_limit)[0]


def edge_toughness_oracle(
    G: GraphicMatroid, c: int, limit: int = DEFAULT_SUBSET_LIMIT
) -> Fraction:
    """
    Direct minimum of |X| / (omega(G - X) - c) over edge sets with omega(G - X) > c.

    Raises:
        CapacityError: If 2^|E| exceeds ``limit``
    """
    n_vertices = len(G.vertices)
    if not 1 <= c <= n_vertices - 1:
        raise InputError(f"c must lie in [1, {n_vertices - 1}], got {c}")
    if 1 << G.size > limit:
        raise CapacityError("Too many edge subsets", limit=limit, partial=1 << G.size)
    best: Optional[Fraction] = None
    for X in range(1, 1 << G.size):
        omega = n_vertices - G._rank(G.full & ~X)
        if omega <= c:
            continue
        value = Fraction(X.bit_count(), omega - c)
        if best is None or value < best:
            best = value
    if best is None:
        raise InputError(f"No edge set leaves more than {c} components")
    return best


def serial_covering_check(M: Matroid, X: Mask, k: int) -> dict:
    """
    a(M / X) <= k and a(M | X) <= k imply a(M) <= k.

    Minors with loops count as uncoverable.
    """
    M.ground.validate(X)
    a_whole = cover_number(M)
    a_restricted = cover_number(restriction(M, X, allow_loops=True)) if X else 0
    rest = M.full & ~X
    if not X:
        a_contracted = a_whole
    elif not rest:
        a_contracted = 0
    else:
        a_contracted = cover_number(minor(M, contract=X, allow_loops=True))
    premise = a_restricted <= k and a_contracted <= k
    return {
        "passed": not premise or a_whole <= k,
        "premise": premise,
        "a": a_whole,
        "a_restricted": a_restricted,
        "a_contracted": a_contracted,
    }


def serial_arboricity_check(G: GraphicMatroid, H: Mask, k: int) -> dict:
    """
    Graph form of the serial rule for a subgraph H whose components are
    vertex-induced: a(G/H) <= k and a(H) <= k imply a(G) <= k.

    Raises:
        InputError: If some component of H is not vertex-induced in G
    """
    G.ground.validate(H)
    sub = nx.Graph()
    for i in iter_bits(H):
        sub.add_edge(*G.endpoints(G.ground.elements[i]))
    home = {v: n for n, part in enumerate(nx.connected_components(sub)) for v in part}
    for i in iter_bits(G.full & ~H):
        e = G.ground.elements[i]
        u, v = G.endpoints(e)
        if u in home and home.get(v) == home[u]:
            raise InputError(f"Edge {e!r} joins vertices of one component of H but is not in H")
    return serial_covering_check(G, H, k)

