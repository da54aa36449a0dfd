"""
Matroid-core operations over rank-oracle handles.

Constructors, minors, duality, truncation, direct sums, base enumeration and
connected components. All functions take and return immutable handles and
int subset masks.
"""

import logging
from collections.abc import Hashable, Iterable, Mapping, Sequence
from typing import Optional

from networkx.utils import UnionFind

from .errors import CapacityError, InputError
from .ground import Mask, Number, iter_bits
from .handles import (
    DirectSumMatroid,
    DualMatroid,
    DualTruncationMatroid,
    GraphicMatroid,
    Matroid,
    MinorMatroid,
    RelabeledMatroid,
    TruncationMatroid,
    UniformMatroid,
)

LOGGER = logging.getLogger(__name__)

DEFAULT_ORACLE_LIMIT = 100_000


def rank(M: Matroid, X: Mask) -> int:
    """r(X), validating that X lies in the ground set."""
    return M.rank(X)


def closure(M: Matroid, X: Mask) -> Mask:
    """
    Closure cl(X) = {e : r(X + e) = r(X)}.

    Example:
        >>> closure(graphic_k3, 0b011)
        7
    """
    r_x = M.rank(X)
    result = X
    for i in range(M.size):
        bit = 1 << i
        if not X & bit and M._rank(X | bit) == r_x:
            result |= bit
    return result


def minor(M: Matroid, delete: Mask = 0, contract: Mask = 0, allow_loops: bool = False) -> Matroid:
    """
    (M / contract) \\ delete on the remaining elements.

    Args:
        M: Matroid handle
        delete: Elements to delete
        contract: Elements to contract
        allow_loops: Permit loops and rank 0 in the result

    Returns:
        Minor handle whose identifiers are those of M

    Raises:
        InputError: If the sets overlap or nothing remains
        DomainError: If the minor has a loop or rank 0 and allow_loops is False
    """
    if not delete and not contract:
        return M
    return MinorMatroid(M, delete, contract, allow_loops=allow_loops)


def deletion(M: Matroid, X: Mask, allow_loops: bool = False) -> Matroid:
    return minor(M, delete=X, allow_loops=allow_loops)


def contraction(M: Matroid, X: Mask, allow_loops: bool = False) -> Matroid:
    return minor(M, contract=X, allow_loops=allow_loops)


def restriction(M: Matroid, X: Mask, allow_loops: bool = False) -> Matroid:
    """M | X, i.e. delete E - X."""
    return minor(M, delete=M.full & ~X, allow_loops=allow_loops)


def dual(M: Matroid) -> Matroid:
    """Dual matroid; the dual of a dual handle is its inner handle."""
    if isinstance(M, DualMatroid):
        return M.inner
    return DualMatroid(M)


def truncation(M: Matroid, t: int) -> Matroid:
    """
    t-truncation for 1 <= t <= |E|.

    For t <= r(M) independent sets are those of size <= t; above r(M) the
    dual truncation ((M*)_{|E|-t})* is returned, which is free at t = |E|.

    Raises:
        InputError: If t is outside [1, |E|]
    """
    if not 1 <= t <= M.size:
        raise InputError(f"Truncation level must lie in [1, {M.size}], got {t}")
    if t <= M.full_rank:
        return TruncationMatroid(M, t)
    return DualTruncationMatroid(M, t)


def direct_sum(parts: Sequence[Matroid]) -> Matroid:
    """Direct sum; a single part is returned unchanged."""
    parts = list(parts)
    if len(parts) == 1:
        return parts[0]
    return DirectSumMatroid(parts)


def relabel(M: Matroid, mapping: Mapping[Hashable, Hashable]) -> Matroid:
    return RelabeledMatroid(M, mapping)


def graphic(edges: Iterable[Sequence], vertices: Iterable[Hashable] = ()) -> GraphicMatroid:
    """
    Graphic matroid from (u, v) pairs or (id, u, v) triples.

    Pairs get identifiers "e1", "e2", ... in input order.
    """
    triples = []
    for n, edge in enumerate(edges, start=1):
        edge = tuple(edge)
        if len(edge) == 2:
            triples.append((f"e{n}", edge[0], edge[1]))
        elif len(edge) == 3:
            triples.append(edge)
        else:
            raise InputError(f"Edge must be (u, v) or (id, u, v), got {edge!r}")
    if not triples:
        raise InputError("Graph has no edges")
    return GraphicMatroid(triples, vertices)


def uniform(n: int, r: int, elements: Optional[Iterable[Hashable]] = None) -> UniformMatroid:
    return UniformMatroid(n, r, elements)


def loops(M: Matroid) -> Mask:
    return M.loops()


def coloops(M: Matroid) -> Mask:
    return M.coloops()


def is_independent(M: Matroid, X: Mask) -> bool:
    return M.is_independent(M.ground.validate(X))


def greedy_max_weight_base(
    M: Matroid, weights: Sequence[Number], maximize: bool = True
) -> Mask:
    """
    Greedy base for index-aligned weights.

    Elements are scanned by weight (descending when maximizing), ties broken by
    ground order; this is exact for any matroid.
    """
    if len(weights) != M.size:
        raise InputError(f"Expected {M.size} weights, got {len(weights)}")
    sign = -1 if maximize else 1
    order = sorted(range(M.size), key=lambda i: (sign * weights[i], i))
    chain = M.prefix_ranks(order)
    base = 0
    previous = 0
    for i, value in zip(order, chain):
        if value > previous:
            base |= 1 << i
            previous = value
    return base


def some_base(M: Matroid) -> Mask:
    return greedy_max_weight_base(M, [0] * M.size)


def extend_to_base(M: Matroid, independent: Mask) -> Mask:
    """Grow an independent set to a base by scanning the ground order."""
    current = independent
    size = current.bit_count()
    for i in range(M.size):
        if size == M.full_rank:
            break
        bit = 1 << i
        if not current & bit and M._rank(current | bit) == size + 1:
            current |= bit
            size += 1
    return current


def enumerate_bases(M: Matroid, limit: int = DEFAULT_ORACLE_LIMIT) -> list[Mask]:
    """
    All bases in lexicographic order of their indicator bits.

    Depth-first over elements with rank pruning: a branch is abandoned as soon
    as the chosen set plus everything still available cannot reach r(E).

    Raises:
        CapacityError: If more than ``limit`` bases exist
    """
    n, r = M.size, M.full_rank
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] | (1 << i)
    bases: list[Mask] = []

    def extend(i: int, current: Mask, size: int) -> None:
        if size == r:
            bases.append(current)
            if len(bases) > limit:
                raise CapacityError("Too many bases to enumerate", limit=limit, partial=len(bases))
            return
        if n - i < r - size or M._rank(current | suffix[i]) < r:
            return
        bit = 1 << i
        if M._rank(current | bit) == size + 1:
            extend(i + 1, current | bit, size + 1)
        extend(i + 1, current, size)

    extend(0, 0, 0)
    LOGGER.debug("Enumerated %d bases of %r", len(bases), M)
    return bases


def components(M: Matroid) -> list[Mask]:
    """
    Connected components (finest separators), ordered by their first element.

    Two elements are connected when a circuit contains both; it suffices to
    join the fundamental circuits of one base. Loops and coloops are singletons.
    """
    base = some_base(M)
    r = M.full_rank
    uf = UnionFind(range(M.size))
    for e in iter_bits(M.full & ~base):
        bit = 1 << e
        if M._rank(bit) == 0:
            continue
        for f in iter_bits(base):
            if M._rank((base & ~(1 << f)) | bit) == r:
                uf.union(e, f)
    groups: dict[int, Mask] = {}
    for i in range(M.size):
        root = uf[i]
        groups[root] = groups.get(root, 0) | (1 << i)
    return sorted(groups.values(), key=lambda mask: mask & -mask)


def is_connected(M: Matroid) -> bool:
    return len(components(M)) == 1
