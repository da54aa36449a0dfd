"""
Universal densities of all truncations, read off the principal partition.

For t <= r(M) the spectrum follows the primal partition: with E_i the nested
sets and s_i the levels, b_i = floor(|E_i| s_i) and c_i = b_i + r(E - E_i);
for c_{i-1} < t <= c_i the t-truncation has density (t - r(E - E_i)) / |E_i|
on E_i and keeps eta* elsewhere.

Above r(M) the same construction runs on the dual with its loops deleted
(the coloops of M) and the values are complemented: eta*_t = 1 - eta'_{|E|-t}.
"""

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import dual, minor, truncation
from .density import fractional_arboricity, strength
from .errors import InputError
from .ground import DensityVector, Element, format_fraction
from .handles import Matroid
from .sfm import DEFAULT_EXHAUSTIVE_LIMIT
from .universal import PrincipalPartition, universal_density

LOGGER = logging.getLogger(__name__)

RANK_SAMPLES = 256


@dataclass(frozen=True)
class Formula:
    """(t - offset) / denominator, or a constant when denominator is None."""

    offset: int = 0
    denominator: Optional[int] = None
    constant: Fraction = Fraction(0)

    def at(self, t: int) -> Fraction:
        if self.denominator is None:
            return self.constant
        return Fraction(t - self.offset, self.denominator)

    def render(self) -> str:
        if self.denominator is None:
            return format_fraction(self.constant)
        if self.offset == 0:
            return f"t/{self.denominator}"
        return f"(t - {self.offset})/{self.denominator}"


@dataclass(frozen=True)
class Breakpoint:
    level: Fraction
    nested_size: int
    outer_rank: int
    b: int
    c: int


@dataclass(frozen=True)
class Region:
    """Consecutive truncation levels t_from..t_to sharing per-element formulas."""

    t_from: int
    t_to: int
    formulas: dict[Element, Formula]


@dataclass(frozen=True)
class SpectrumTable:
    size: int
    rank: int
    balancity: int
    eta: DensityVector
    partition: PrincipalPartition
    breakpoints: tuple[Breakpoint, ...]
    dual_breakpoints: tuple[Breakpoint, ...]
    regions: tuple[Region, ...] = field(default=())

    def region_of(self, t: int) -> Region:
        for region in self.regions:
            if region.t_from <= t <= region.t_to:
                return region
        raise InputError(f"Truncation level must lie in [1, {self.size}], got {t}")

    def density(self, t: int) -> DensityVector:
        """eta*_t for one truncation level."""
        region = self.region_of(t)
        return {e: formula.at(t) for e, formula in region.formulas.items()}

    def matrix(self) -> dict[int, DensityVector]:
        return {t: self.density(t) for t in range(1, self.size + 1)}

    def ranges(self, groups: dict[str, list[Element]]) -> list[dict]:
        """
        Compact report: one row per region with one rendered formula per group.

        A region covering a single t shows evaluated constants. Groups must be
        unions of principal blocks, so every member shares one formula.
        """
        rows = []
        for region in self.regions:
            cells = {}
            for name, members in groups.items():
                rendered = set()
                for e in members:
                    formula = region.formulas[e]
                    if region.t_from == region.t_to:
                        rendered.add(format_fraction(formula.at(region.t_from)))
                    else:
                        rendered.add(formula.render())
                if len(rendered) != 1:
                    raise InputError(f"Group {name!r} mixes formulas {sorted(rendered)}")
                cells[name] = rendered.pop()
            rows.append({"t_from": region.t_from, "t_to": region.t_to, "cells": cells})
        return rows


def balancity(M: Matroid, exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT) -> int:
    """
    Largest t for which the t-truncation is homogeneous: floor(|E| / D(M))
    clamped to [1, r(M)].

    Example:
        >>> balancity(graphic_k4)
        3
    """
    d_value, _ = fractional_arboricity(M, exhaustive_limit=exhaustive_limit)
    return max(1, min(M.full_rank, math.floor(M.size / d_value)))


def _breakpoints(M: Matroid, partition: PrincipalPartition) -> list[Breakpoint]:
    out = []
    for level, nested in zip(partition.levels, partition.nested_sets):
        size = nested.bit_count()
        outer_rank = M._rank(M.full & ~nested)
        b = math.floor(size * level)
        out.append(Breakpoint(level, size, outer_rank, b, b + outer_rank))
    return out


def _primal_regions(
    M: Matroid, eta: DensityVector, partition: PrincipalPartition, points: list[Breakpoint]
) -> list[Region]:
    elements = M.ground.elements
    regions = []
    previous = 0
    for point, nested in zip(points, partition.nested_sets):
        if point.c <= previous:
            continue
        formulas = {}
        for i, e in enumerate(elements):
            if nested >> i & 1:
                formulas[e] = Formula(offset=point.outer_rank, denominator=point.nested_size)
            else:
                formulas[e] = Formula(constant=eta[e])
        regions.append(Region(previous + 1, point.c, formulas))
        previous = point.c
    return regions


def _dual_regions(
    M: Matroid, exhaustive_limit: int
) -> tuple[list[Region], list[Breakpoint]]:
    """Regions for r(M) < t <= |E| from the loopless part of the dual."""
    n = M.size
    coloops = M.coloops()
    D = dual(M)
    if coloops == M.full:
        return [], []
    D_loopless = minor(D, delete=coloops) if coloops else D
    eta_d, partition_d = universal_density(D_loopless, exhaustive_limit=exhaustive_limit)
    points = _breakpoints(D_loopless, partition_d)
    elements_d = D_loopless.ground.elements
    regions = []
    previous = 0
    for point, nested in zip(points, partition_d.nested_sets):
        if point.c <= previous:
            continue
        offset = n - point.nested_size - point.outer_rank
        formulas = {e: Formula(constant=Fraction(1)) for e in M.ground.members(coloops)}
        for i, e in enumerate(elements_d):
            if nested >> i & 1:
                formulas[e] = Formula(offset=offset, denominator=point.nested_size)
            else:
                formulas[e] = Formula(constant=1 - eta_d[e])
        # s = |E| - t in (previous, c] with s = 0 folded into the first region
        t_to = n - previous - 1 if previous else n
        t_from = max(n - point.c, M.full_rank + 1)
        if t_from <= t_to:
            regions.append(Region(t_from, t_to, formulas))
        previous = point.c
    regions.reverse()
    return regions, points


def truncation_spectrum(
    M: Matroid, exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT
) -> SpectrumTable:
    """
    Universal densities of every truncation M_t, t = 1..|E|, of an unweighted matroid.

    Returns:
        SpectrumTable whose regions cover 1..|E| in order

    Raises:
        DomainError: If M has loops or rank 0
    """
    eta, partition = universal_density(M, exhaustive_limit=exhaustive_limit)
    points = _breakpoints(M, partition)
    regions = _primal_regions(M, eta, partition, points)
    dual_regions, dual_points = _dual_regions(M, exhaustive_limit)
    ground = M.ground.elements
    regions += [
        Region(r.t_from, r.t_to, {e: r.formulas[e] for e in ground}) for r in dual_regions
    ]
    b = max(1, min(M.full_rank, math.floor(M.size * partition.levels[0])))
    LOGGER.info(
        "Spectrum with %d primal and %d dual regions, balancity %d",
        len(regions) - len(dual_regions),
        len(dual_regions),
        b,
    )
    return SpectrumTable(
        size=M.size,
        rank=M.full_rank,
        balancity=b,
        eta=eta,
        partition=partition,
        breakpoints=tuple(points),
        dual_breakpoints=tuple(dual_points),
        regions=tuple(regions),
    )


def dual_truncation_arboricity(
    M: Matroid, t: int, exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT
) -> Fraction:
    """
    D(M_t) = max |X| / (t - r(M) + r(X)) for r(M) <= t < |E|.

    Raises:
        InputError: If t is outside [r(M), |E|)
    """
    if not M.full_rank <= t < M.size:
        raise InputError(f"Level must lie in [{M.full_rank}, {M.size}), got {t}")
    return fractional_arboricity(truncation(M, t), exhaustive_limit=exhaustive_limit)[0]


def _same_ranks(A: Matroid, B: Matroid, exhaustive_limit: int, rng: random.Random) -> bool:
    n = A.size
    if n <= exhaustive_limit:
        masks = range(1 << n)
    else:
        masks = [rng.getrandbits(n) for _ in range(RANK_SAMPLES)]
    return all(A._rank(mask) == B._rank(mask) for mask in masks)


def _issue(check: str, t: Optional[int], detail: str) -> dict:
    return {"check": check, "t": t, "detail": detail}


def spectrum_consistency_check(
    M: Matroid,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    compare_oracle: bool = True,
    seed: int = 0,
) -> dict:
    """
    Cross-check the spectrum against direct computation on truncation handles.

    Checks the breakpoint invariants, monotonicity of D, theta and S along t,
    homogeneity exactly up to the balancity, the contraction identity
    (M_t) / X = (M / X)_{t - r(X)} above the balancity, block merging, and (with
    ``compare_oracle``) every eta*_t against universal_density(truncation(M, t)).

    Returns:
        {"passed": bool, "checked": int, "failures": [{"check", "t", "detail"}]}
    """
    table = truncation_spectrum(M, exhaustive_limit)
    kw = {"exhaustive_limit": exhaustive_limit}
    rng = random.Random(seed)
    n, r = M.size, M.full_rank
    failures = []
    checked = 0

    c_values = [0] + [p.c for p in table.breakpoints]
    checked += 1
    if c_values[-1] != r or any(a > b for a, b in zip(c_values, c_values[1:])):
        failures.append(_issue("breakpoint order", None, f"c = {c_values[1:]}"))
    for i, point in enumerate(table.breakpoints):
        checked += 1
        if point.c - point.b > c_values[i]:
            failures.append(_issue("breakpoint gap", None, f"c_{i + 1} - b_{i + 1} > c_{i}"))

    handles = {t: truncation(M, t) for t in range(1, r + 1)}
    d_values = {t: fractional_arboricity(handles[t], **kw)[0] for t in handles}
    s_values = {t: strength(handles[t], **kw)[0] for t in handles}
    theta_values = {t: Fraction(handles[t].size, handles[t].full_rank) for t in handles}
    for t in range(1, r):
        checked += 3
        if d_values[t] < d_values[t + 1]:
            failures.append(_issue("arboricity decreases", t, f"{d_values[t]} < {d_values[t + 1]}"))
        if not theta_values[t] > theta_values[t + 1]:
            failures.append(
                _issue("density decreases", t, f"{theta_values[t]} <= {theta_values[t + 1]}")
            )
        if not s_values[t] > s_values[t + 1]:
            failures.append(_issue("strength decreases", t, f"{s_values[t]} <= {s_values[t + 1]}"))
    for t in range(1, r + 1):
        checked += 1
        homogeneous = s_values[t] == theta_values[t]
        if homogeneous != (t <= table.balancity):
            failures.append(
                _issue("homogeneous up to balancity", t, f"homogeneous={homogeneous}")
            )

    c_iter = list(zip(table.breakpoints, table.partition.nested_sets))
    for t in range(table.balancity + 1, r + 1):
        nested = next(ns for point, ns in c_iter if t <= point.c)
        X = M.full & ~nested
        if not X:
            continue
        checked += 1
        left = minor(handles[t], contract=X, allow_loops=True)
        right = truncation(minor(M, contract=X, allow_loops=True), t - M._rank(X))
        if not _same_ranks(left, right, exhaustive_limit, rng):
            failures.append(_issue("truncation commutes with contraction", t, "rank mismatch"))

    previous_blocks = 0
    for t in range(1, r + 1):
        checked += 1
        blocks = len(set(table.density(t).values()))
        if blocks < previous_blocks:
            failures.append(_issue("blocks merge as t decreases", t, f"{blocks} blocks"))
        previous_blocks = blocks

    for t in range(1, n + 1):
        checked += 1
        densities = table.density(t)
        if sum(densities.values()) != t:
            failures.append(_issue("density sums to t", t, str(sum(densities.values()))))
        if compare_oracle:
            checked += 1
            direct, _ = universal_density(truncation(M, t), **kw)
            if direct != densities:
                failures.append(_issue("formula matches direct computation", t, "differs"))

    LOGGER.info("Spectrum consistency: %d checks, %d failures", checked, len(failures))
    return {"passed": not failures, "checked": checked, "failures": failures}

