"""
Rank-oracle matroid handles.

Every handle is immutable and answers rank queries on subset masks of its
GroundSet. Composite handles (dual, minor, truncation, direct sum) compute rank
by formula over their inner handles; nothing materializes independent sets.
Rank values are memoized per handle in a bounded, thread-safe cache.
"""

import logging
from collections.abc import Hashable, Iterable, Mapping, Sequence
from functools import lru_cache
from typing import Optional

import networkx as nx
from networkx.utils import UnionFind

from .errors import DomainError, InputError
from .ground import GroundSet, Mask, iter_bits

LOGGER = logging.getLogger(__name__)

RANK_CACHE_SIZE = 1 << 17
EXCHANGE_CHECK_LIMIT = 400


class Matroid:
    """
    Base class for rank-oracle matroids.

    Subclasses implement ``_compute_rank`` for masks already known to lie in
    the ground set, and may override ``prefix_ranks`` with a faster chain
    evaluation.
    """

    kind = "abstract"

    def __init__(self, ground: GroundSet):
        self._ground = ground
        self._cached_rank = lru_cache(maxsize=RANK_CACHE_SIZE)(self._compute_rank)
        self._full_rank: Optional[int] = None

    # -- oracle -----------------------------------------------------------

    def _compute_rank(self, mask: Mask) -> int:
        raise NotImplementedError

    def _rank(self, mask: Mask) -> int:
        return self._cached_rank(mask)

    def rank(self, mask: Mask) -> int:
        """
        Rank of a subset.

        Args:
            mask: Subset mask over this handle's ground set

        Returns:
            r(X)

        Raises:
            InputError: If the mask has bits outside the ground set
        """
        return self._rank(self._ground.validate(mask))

    def prefix_ranks(self, order: Sequence[int]) -> list[int]:
        """Ranks of the growing prefixes of ``order`` (one entry per element)."""
        ranks = []
        mask = 0
        for i in order:
            mask |= 1 << i
            ranks.append(self._rank(mask))
        return ranks

    # -- derived properties -----------------------------------------------

    @property
    def ground(self) -> GroundSet:
        return self._ground

    @property
    def size(self) -> int:
        return self._ground.size

    @property
    def full(self) -> Mask:
        return self._ground.full

    @property
    def full_rank(self) -> int:
        if self._full_rank is None:
            self._full_rank = self._rank(self._ground.full)
        return self._full_rank

    def is_independent(self, mask: Mask) -> bool:
        return self._rank(mask) == mask.bit_count()

    def loops(self) -> Mask:
        result = 0
        for i in range(self.size):
            if self._rank(1 << i) == 0:
                result |= 1 << i
        return result

    def coloops(self) -> Mask:
        full, r = self.full, self.full_rank
        result = 0
        for i in range(self.size):
            if self._rank(full & ~(1 << i)) < r:
                result |= 1 << i
        return result

    def describe(self) -> dict:
        return {"kind": self.kind, "size": self.size, "rank": self.full_rank}

    def __repr__(self) -> str:
        return f"<{type(self).__name__} |E|={self.size} r={self.full_rank}>"

    def _require_loopless(self) -> None:
        if self.full_rank == 0:
            raise DomainError(f"{self.kind} matroid has rank 0")
        loops = self.loops()
        if loops:
            element = self._ground.elements[next(iter_bits(loops))]
            raise DomainError(f"{self.kind} matroid has a loop at {element!r}", element=element)


class GraphicMatroid(Matroid):
    """
    Cycle matroid of a multigraph; elements are edge identifiers.

    Example:
        >>> m = GraphicMatroid([("e1", 1, 2), ("e2", 2, 3), ("e3", 1, 3)])
        >>> m.full_rank
        2
    """

    kind = "graphic"

    def __init__(
        self,
        edges: Sequence[tuple[Hashable, Hashable, Hashable]],
        vertices: Iterable[Hashable] = (),
    ):
        for key, u, v in edges:
            if u == v:
                raise DomainError(f"Edge {key!r} is a self-loop at vertex {u!r}", element=key)
        super().__init__(GroundSet(key for key, _, _ in edges))
        self._ends = tuple((u, v) for _, u, v in edges)
        endpoints = [x for pair in self._ends for x in pair]
        self._vertices = tuple(dict.fromkeys([*vertices, *endpoints]))

    @classmethod
    def from_graph(cls, graph: nx.MultiGraph) -> "GraphicMatroid":
        """Build from a networkx (multi)graph, keeping its edge keys as identifiers."""
        if graph.is_multigraph():
            triples = [(key, u, v) for u, v, key in graph.edges(keys=True)]
        else:
            triples = [(f"{u}-{v}", u, v) for u, v in graph.edges()]
        if len({key for key, _, _ in triples}) != len(triples):
            triples = [(f"{u}-{v}#{key}", u, v) for key, u, v in triples]
        return cls(triples, vertices=graph.nodes)

    @property
    def vertices(self) -> tuple:
        return self._vertices

    def endpoints(self, element: Hashable) -> tuple:
        return self._ends[self._ground.index(element)]

    def graph(self, mask: Optional[Mask] = None) -> nx.MultiGraph:
        """The underlying multigraph, optionally restricted to the edges of ``mask``."""
        G = nx.MultiGraph()
        G.add_nodes_from(self._vertices)
        keep = self.full if mask is None else mask
        for i in iter_bits(keep):
            u, v = self._ends[i]
            G.add_edge(u, v, key=self._ground.elements[i])
        return G

    def _compute_rank(self, mask: Mask) -> int:
        uf = UnionFind()
        rank = 0
        for i in iter_bits(mask):
            u, v = self._ends[i]
            if uf[u] != uf[v]:
                uf.union(u, v)
                rank += 1
        return rank

    def prefix_ranks(self, order: Sequence[int]) -> list[int]:
        uf = UnionFind()
        ranks = []
        rank = 0
        for i in order:
            u, v = self._ends[i]
            if uf[u] != uf[v]:
                uf.union(u, v)
                rank += 1
            ranks.append(rank)
        return ranks

    def describe(self) -> dict:
        info = super().describe()
        info["vertices"] = len(self._vertices)
        return info


class UniformMatroid(Matroid):
    """U(n, r): every r-subset is a base."""

    kind = "uniform"

    def __init__(self, n: int, r: int, elements: Optional[Iterable[Hashable]] = None):
        if n < 1:
            raise InputError(f"Uniform matroid needs n >= 1, got {n}")
        if r < 0 or r > n:
            raise InputError(f"Uniform matroid needs 0 <= r <= n, got r={r}, n={n}")
        if r == 0:
            raise DomainError(f"U({n},0) has rank 0")
        ground = GroundSet(range(n) if elements is None else elements)
        if ground.size != n:
            raise InputError(f"Uniform matroid expects {n} elements, got {ground.size}")
        super().__init__(ground)
        self._r = r

    def _compute_rank(self, mask: Mask) -> int:
        return min(self._r, mask.bit_count())

    def prefix_ranks(self, order: Sequence[int]) -> list[int]:
        return [min(self._r, i + 1) for i in range(len(order))]

    def describe(self) -> dict:
        return {**super().describe(), "n": self.size, "r": self._r}


class ExplicitMatroid(Matroid):
    """Matroid given by its list of bases; r(X) = max |X ∩ B|."""

    kind = "explicit"

    def __init__(self, elements: Iterable[Hashable], bases: Iterable[Iterable[Hashable]]):
        ground = GroundSet(elements)
        masks = sorted({ground.mask(base) for base in bases})
        if not masks:
            raise InputError("Explicit matroid needs at least one base")
        sizes = {m.bit_count() for m in masks}
        if len(sizes) != 1:
            raise InputError(f"Bases have different sizes: {sorted(sizes)}")
        self._bases = tuple(masks)
        super().__init__(ground)
        self._require_loopless()
        if len(masks) <= EXCHANGE_CHECK_LIMIT:
            self._check_exchange()

    @property
    def bases(self) -> tuple[Mask, ...]:
        return self._bases

    def _compute_rank(self, mask: Mask) -> int:
        return max((mask & base).bit_count() for base in self._bases)

    def _check_exchange(self) -> None:
        family = set(self._bases)
        for first in self._bases:
            for second in self._bases:
                for x in iter_bits(first & ~second):
                    without = first & ~(1 << x)
                    if not any(without | (1 << y) in family for y in iter_bits(second & ~first)):
                        raise InputError(
                            "Base family violates the exchange axiom at element "
                            f"{self._ground.elements[x]!r}"
                        )


class DualMatroid(Matroid):
    """Dual matroid: r*(X) = |X| - r(E) + r(E - X). May contain loops."""

    kind = "dual"

    def __init__(self, inner: Matroid):
        super().__init__(inner.ground)
        self._inner = inner

    @property
    def inner(self) -> Matroid:
        return self._inner

    def _compute_rank(self, mask: Mask) -> int:
        inner = self._inner
        return mask.bit_count() - inner.full_rank + inner._rank(inner.full & ~mask)

    def prefix_ranks(self, order: Sequence[int]) -> list[int]:
        inner = self._inner
        order = list(order)
        n = len(order)
        outside = inner.full
        for i in order:
            outside &= ~(1 << i)
        # rank of E - X_k is the rank of the untouched part plus the suffix order[k:]
        if outside:
            head = list(iter_bits(outside))
            chain = inner.prefix_ranks(head + order[::-1])
            base = chain[len(head) - 1]
            tail = chain[len(head):]
        else:
            base = 0
            tail = inner.prefix_ranks(order[::-1])
        suffix = [base] + tail  # suffix[j] = rank(outside + last j elements of order)
        r = inner.full_rank
        return [k + 1 - r + suffix[n - k - 1] for k in range(n)]


class MinorMatroid(Matroid):
    """
    Minor (M / C) \\ D on E - C - D; r(X) = r_M(X ∪ C) - r_M(C).

    Nested minors are flattened onto the innermost non-minor handle, so
    identifiers are always those of the original ground set.
    """

    kind = "minor"

    def __init__(
        self,
        inner: Matroid,
        delete: Mask = 0,
        contract: Mask = 0,
        allow_loops: bool = False,
    ):
        inner.ground.validate(delete)
        inner.ground.validate(contract)
        if delete & contract:
            overlap = inner.ground.members(delete & contract)
            raise InputError(f"Deleted and contracted sets overlap: {overlap!r}")
        if isinstance(inner, MinorMatroid):
            delete = inner._lift_mask(delete) | inner._deleted
            contract = inner._lift_mask(contract) | inner._contracted
            inner = inner._base
        kept = [i for i in range(inner.size) if not (delete | contract) >> i & 1]
        if not kept:
            raise InputError("Minor would have an empty ground set")
        super().__init__(GroundSet(inner.ground.elements[i] for i in kept))
        self._base = inner
        self._lift = tuple(1 << i for i in kept)
        self._deleted = delete
        self._contracted = contract
        self._contract_rank = inner._rank(contract)
        if not allow_loops:
            self._require_loopless()

    @property
    def base(self) -> Matroid:
        return self._base

    @property
    def deleted(self) -> Mask:
        return self._deleted

    @property
    def contracted(self) -> Mask:
        return self._contracted

    def _lift_mask(self, mask: Mask) -> Mask:
        lifted = 0
        lift = self._lift
        for i in iter_bits(mask):
            lifted |= lift[i]
        return lifted

    def _compute_rank(self, mask: Mask) -> int:
        return self._base._rank(self._lift_mask(mask) | self._contracted) - self._contract_rank

    def prefix_ranks(self, order: Sequence[int]) -> list[int]:
        head = list(iter_bits(self._contracted))
        lifted = [self._lift[i].bit_length() - 1 for i in order]
        chain = self._base.prefix_ranks(head + lifted)
        offset = len(head)
        return [value - self._contract_rank for value in chain[offset:]]


class TruncationMatroid(Matroid):
    """t-truncation for t <= r(M): r_t(X) = min(t, r(X))."""

    kind = "truncation"

    def __init__(self, inner: Matroid, t: int):
        if not 1 <= t <= inner.full_rank:
            raise InputError(f"Truncation level must lie in [1, {inner.full_rank}], got {t}")
        super().__init__(inner.ground)
        self._inner = inner
        self._t = t

    @property
    def inner(self) -> Matroid:
        return self._inner

    @property
    def level(self) -> int:
        return self._t

    def _compute_rank(self, mask: Mask) -> int:
        return min(self._t, self._inner._rank(mask))

    def prefix_ranks(self, order: Sequence[int]) -> list[int]:
        return [min(self._t, value) for value in self._inner.prefix_ranks(order)]


class DualTruncationMatroid(Matroid):
    """
    Dual truncation ((M*)_{|E|-t})* for r(M) < t <= |E|.

    r_t(X) = min(|X|, t - r(M) + r(X)); bases are the t-sets containing a base.
    t = |E| yields the free matroid.
    """

    kind = "dual-truncation"

    def __init__(self, inner: Matroid, t: int):
        if not inner.full_rank < t <= inner.size:
            raise InputError(
                f"Dual truncation level must lie in ({inner.full_rank}, {inner.size}], got {t}"
            )
        super().__init__(inner.ground)
        self._inner = inner
        self._t = t
        self._shift = t - inner.full_rank

    @property
    def inner(self) -> Matroid:
        return self._inner

    @property
    def level(self) -> int:
        return self._t

    def _compute_rank(self, mask: Mask) -> int:
        return min(mask.bit_count(), self._shift + self._inner._rank(mask))

    def prefix_ranks(self, order: Sequence[int]) -> list[int]:
        chain = self._inner.prefix_ranks(order)
        return [min(k + 1, self._shift + value) for k, value in enumerate(chain)]


class DirectSumMatroid(Matroid):
    """Direct sum of handles with pairwise disjoint identifiers."""

    kind = "direct-sum"

    def __init__(self, parts: Sequence[Matroid]):
        parts = tuple(parts)
        if not parts:
            raise InputError("Direct sum needs at least one part")
        elements = [e for part in parts for e in part.ground]
        if len(set(elements)) != len(elements):
            seen, clashes = set(), []
            for e in elements:
                if e in seen:
                    clashes.append(e)
                seen.add(e)
            raise InputError(f"Direct sum parts share identifiers: {clashes[:5]!r}")
        super().__init__(GroundSet(elements))
        self._parts = parts
        offsets, start = [], 0
        for part in parts:
            offsets.append(start)
            start += part.size
        self._offsets = tuple(offsets)

    @property
    def parts(self) -> tuple[Matroid, ...]:
        return self._parts

    def part_masks(self) -> list[Mask]:
        """Masks of each part's elements within the sum."""
        return [part.full << offset for part, offset in zip(self._parts, self._offsets)]

    def _compute_rank(self, mask: Mask) -> int:
        return sum(
            part._rank((mask >> offset) & part.full)
            for part, offset in zip(self._parts, self._offsets)
        )

    def _locate(self, i: int) -> tuple[int, int]:
        for p in range(len(self._parts) - 1, -1, -1):
            if i >= self._offsets[p]:
                return p, i - self._offsets[p]
        raise InputError(f"Index {i} outside direct sum")

    def prefix_ranks(self, order: Sequence[int]) -> list[int]:
        located = [self._locate(i) for i in order]
        per_part: list[list[int]] = [[] for _ in self._parts]
        for p, j in located:
            per_part[p].append(j)
        chains = [
            part.prefix_ranks(sub) if sub else [] for part, sub in zip(self._parts, per_part)
        ]
        counters = [0] * len(self._parts)
        current = [0] * len(self._parts)
        total = 0
        ranks = []
        for p, _ in located:
            value = chains[p][counters[p]]
            counters[p] += 1
            total += value - current[p]
            current[p] = value
            ranks.append(total)
        return ranks


class RelabeledMatroid(Matroid):
    """Same matroid with renamed elements."""

    kind = "relabel"

    def __init__(self, inner: Matroid, mapping: Mapping[Hashable, Hashable]):
        super().__init__(GroundSet(mapping.get(e, e) for e in inner.ground))
        self._inner = inner

    @property
    def inner(self) -> Matroid:
        return self._inner

    def _compute_rank(self, mask: Mask) -> int:
        return self._inner._rank(mask)

    def prefix_ranks(self, order: Sequence[int]) -> list[int]:
        return self._inner.prefix_ranks(order)

