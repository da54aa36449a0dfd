"""
Matroid partition: k disjoint independent sets of maximum total size.

Elements are inserted one at a time along shortest augmenting paths in the
exchange graph (an element y points to z when z sits in some set I_j and
I_j - z + y is independent). When no path exists the elements reachable from
the uncovered ones form a set T with r(T) = |I_j ∩ T| for every j, which gives
max |I_1 ∪ ... ∪ I_k| = |E - T| + k r(T).
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .core import extend_to_base
from .errors import InputError
from .ground import Mask, iter_bits
from .handles import Matroid

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class PartitionResult:
    """k disjoint independent sets and, if some element stayed out, the tight set T."""

    sets: tuple[Mask, ...]
    uncovered: Mask
    tight: Mask

    @property
    def union(self) -> Mask:
        out = 0
        for s in self.sets:
            out |= s
        return out


@dataclass(frozen=True)
class UnionResult:
    """Either ``bases`` (success) or a violating ``witness`` set."""

    k: int
    bases: tuple[Mask, ...] = field(default=())
    witness: Optional[Mask] = None

    @property
    def ok(self) -> bool:
        return self.witness is None


def _augment(M: Matroid, sets: list[Mask], owner: list[int], start: int) -> tuple[bool, Mask]:
    """Try to insert ``start``; returns (success, visited elements)."""
    k = len(sets)
    parent: dict[int, Optional[tuple[int, int]]] = {start: None}
    queue = deque([start])
    while queue:
        y = queue.popleft()
        bit = 1 << y
        for j in range(k):
            if owner[y] == j:
                continue
            candidate = sets[j] | bit
            if M._rank(candidate) == candidate.bit_count():
                # y enters set j; walk back along the exchange path
                current, target = y, j
                while True:
                    previous = owner[current]
                    if previous >= 0:
                        sets[previous] &= ~(1 << current)
                    sets[target] |= 1 << current
                    owner[current] = target
                    link = parent[current]
                    if link is None:
                        break
                    current, target = link
                return True, 0
            for z in iter_bits(sets[j]):
                if z in parent:
                    continue
                swapped = candidate & ~(1 << z)
                if M._rank(swapped) == swapped.bit_count():
                    parent[z] = (y, j)
                    queue.append(z)
    visited = 0
    for e in parent:
        visited |= 1 << e
    return False, visited


def matroid_partition(M: Matroid, k: int) -> PartitionResult:
    """
    Partition a maximum number of elements into k independent sets.

    Raises:
        InputError: If k < 1
    """
    if k < 1:
        raise InputError(f"Number of sets must be positive, got {k}")
    sets = [0] * k
    owner = [-1] * M.size
    uncovered = 0
    for e in range(M.size):
        if M._rank(1 << e) == 0:
            uncovered |= 1 << e
            continue
        inserted, _ = _augment(M, sets, owner, e)
        if not inserted:
            uncovered |= 1 << e
    tight = 0
    for e in iter_bits(uncovered):
        # The partition is maximum, so these searches only collect reachable elements
        _, visited = _augment(M, sets, owner, e)
        tight |= visited
    LOGGER.debug("Partition into %d sets left %d elements uncovered", k, uncovered.bit_count())
    return PartitionResult(sets=tuple(sets), uncovered=uncovered, tight=tight)


def base_packing(M: Matroid, k: int) -> UnionResult:
    """
    k pairwise disjoint bases, or X with |E - X| < k (r(E) - r(X)).

    Example:
        >>> result = base_packing(graphic_k4, 2)
        >>> result.ok, len(result.bases)
        (True, 2)
    """
    partition = matroid_partition(M, k)
    r = M.full_rank
    if all(s.bit_count() == r for s in partition.sets):
        return UnionResult(k=k, bases=partition.sets)
    return UnionResult(k=k, witness=partition.tight)


def base_covering(M: Matroid, k: int) -> UnionResult:
    """
    k bases whose union is E, or X with |X| > k r(X).
    """
    partition = matroid_partition(M, k)
    if not partition.uncovered:
        return UnionResult(k=k, bases=tuple(extend_to_base(M, s) for s in partition.sets))
    return UnionResult(k=k, witness=partition.tight)


def covering_number(M: Matroid, limit: Optional[int] = None) -> int:
    """Smallest k with a k-base cover of E, by increasing k (a(M) <= |E|)."""
    upper = M.size if limit is None else limit
    for k in range(1, upper + 1):
        if not matroid_partition(M, k).uncovered:
            return k
    raise InputError(f"No cover with at most {upper} bases")
