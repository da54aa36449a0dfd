"""
Weighted strength, fractional arboricity and their maximal optimal sets.

Both quantities are found by Dinkelbach iteration on the parametric family
g_lam(X) = lam * r(X) - sigma(X), each step solved by submodular minimization
with exact rational values:

- D(M) = max sigma(X)/r(X): increase lam from sigma(E)/r(E) until min g_lam = 0;
  the maximal minimizer at that lam is the core.
- S(M) = min sigma(X)/(r(E) - r(E - X)): with Y = E - X the same family
  applies; decrease lam until E minimizes g_lam. The maximal optimal X is the
  complement of the minimal minimizer.
"""

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .core import closure, minor, restriction
from .errors import DomainError
from .ground import Element, Mask, Number, WeightTable
from .handles import Matroid
from .sfm import DEFAULT_EXHAUSTIVE_LIMIT, sfm_minimize

LOGGER = logging.getLogger(__name__)

Weights = Optional[Union[Mapping[Element, Number], WeightTable]]


@dataclass(frozen=True)
class DensityReport:
    strength: Fraction
    strength_set: Mask
    arboricity: Fraction
    core: Mask
    tau: int
    cover_number: int


def weight_table(M: Matroid, sigma: Weights = None) -> WeightTable:
    if isinstance(sigma, WeightTable):
        return sigma
    return WeightTable(M.ground, sigma)


def _parametric(M: Matroid, weights: WeightTable, lam: Fraction):
    values = weights.values

    def f(mask: Mask) -> Fraction:
        return lam * M._rank(mask) - weights(mask)

    def prefix(order) -> list[Fraction]:
        chain = M.prefix_ranks(order)
        out = []
        total = Fraction(0)
        for i, r in zip(order, chain):
            total += values[i]
            out.append(lam * r - total)
        return out

    return f, prefix


def fractional_arboricity(
    M: Matroid,
    sigma: Weights = None,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
) -> tuple[Fraction, Mask]:
    """
    Weighted fractional arboricity D_sigma(M) and the core.

    Args:
        M: Loopless matroid of positive rank
        sigma: Element weights (unit weights when None)
        exhaustive_limit: Ground size up to which minimization enumerates subsets

    Returns:
        (D, core) where core is the unique maximal optimal set

    Raises:
        DomainError: If M has a loop or rank 0
    """
    if M.full_rank == 0:
        raise DomainError("Fractional arboricity needs positive rank")
    loops = M.loops()
    if loops:
        element = M.ground.members(loops)[0]
        raise DomainError(
            f"Fractional arboricity is unbounded: loop at {element!r}", element=element
        )
    weights = weight_table(M, sigma)
    lam = weights.total / M.full_rank
    iteration = 0
    while True:
        iteration += 1
        f, prefix = _parametric(M, weights, lam)
        result = sfm_minimize(f, M.size, prefix=prefix, exhaustive_limit=exhaustive_limit)
        LOGGER.debug("arboricity iteration %d: lam=%s min=%s", iteration, lam, result.value)
        if result.value >= 0:
            return lam, result.maximal_minimizer
        X = result.maximal_minimizer
        lam = weights(X) / M._rank(X)


def strength(
    M: Matroid,
    sigma: Weights = None,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
) -> tuple[Fraction, Mask]:
    """
    Weighted strength S_sigma(M) and its unique maximal optimal set.

    Raises:
        DomainError: If M has rank 0
    """
    r = M.full_rank
    if r == 0:
        raise DomainError("Strength needs positive rank")
    weights = weight_table(M, sigma)
    full = M.full
    lam = weights.total / r
    iteration = 0
    while True:
        iteration += 1
        f, prefix = _parametric(M, weights, lam)
        result = sfm_minimize(f, M.size, prefix=prefix, exhaustive_limit=exhaustive_limit)
        LOGGER.debug("strength iteration %d: lam=%s min=%s", iteration, lam, result.value)
        if result.value >= lam * r - weights.total:
            return lam, full & ~result.minimizer
        Y = result.minimizer
        lam = weights(full & ~Y) / (r - M._rank(Y))


def density_report(
    M: Matroid, sigma: Weights = None, exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT
) -> DensityReport:
    """Strength, arboricity, their optimal sets and the integer packing/covering numbers."""
    weights = weight_table(M, sigma)
    s_value, s_set = strength(M, weights, exhaustive_limit)
    d_value, core = fractional_arboricity(M, weights, exhaustive_limit)
    return DensityReport(
        strength=s_value,
        strength_set=s_set,
        arboricity=d_value,
        core=core,
        tau=math.floor(s_value),
        cover_number=math.ceil(d_value),
    )


def arboricity_or_infinity(M: Matroid, sigma: Weights = None, **kwargs) -> Union[Fraction, float]:
    """D_sigma, with +inf for matroids that have loops."""
    if M.loops():
        return math.inf
    return fractional_arboricity(M, sigma, **kwargs)[0]


def _restricted(M: Matroid, weights: WeightTable, sub: Matroid) -> WeightTable:
    index = M.ground.index
    return WeightTable(sub.ground, {e: weights.values[index(e)] for e in sub.ground})


def monotonicity_check(
    M: Matroid,
    H: Mask,
    sigma: Weights = None,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
) -> dict:
    """
    Evaluate the deletion/contraction/restriction inequalities for S and D.

    Only the inequalities whose preconditions hold for H are evaluated; each
    entry records the compared values. Matroids with loops have infinite D.

    Returns:
        {"passed": bool, "checks": [{"check", "applies", "passed", "left", "right"}]}
    """
    M.ground.validate(H)
    weights = weight_table(M, sigma)
    full = M.full
    kw = {"exhaustive_limit": exhaustive_limit}

    def sub_weights(sub: Matroid) -> WeightTable:
        return _restricted(M, weights, sub)

    def S(sub: Matroid):
        return strength(sub, sub_weights(sub), **kw)[0]

    def D(sub: Matroid):
        return arboricity_or_infinity(sub, sub_weights(sub), **kw)

    s_value, e_max = strength(M, weights, **kw)
    d_value, e_min = fractional_arboricity(M, weights, **kw)
    homogeneous = s_value == weights.total / M.full_rank
    spans = closure(M, H) == full
    rest = full & ~H

    contracted = minor(M, contract=H, allow_loops=True) if H and not spans else None
    deleted = minor(M, delete=H) if H and rest else None
    restricted = restriction(M, H) if H else None

    checks = []

    def record(name: str, applies: bool, evaluate) -> None:
        entry = {"check": name, "applies": applies, "passed": True, "left": None, "right": None}
        if applies:
            left, right, ok = evaluate()
            entry.update(passed=bool(ok), left=str(left), right=str(right))
        checks.append(entry)

    record(
        "contraction does not lower strength",
        contracted is not None,
        lambda: (s_value, S(contracted), s_value <= S(contracted)),
    )
    record(
        "deletion does not raise arboricity",
        deleted is not None,
        lambda: (D(deleted), d_value, D(deleted) <= d_value),
    )
    record(
        "strength after deletion at most strength after contraction",
        contracted is not None and deleted is not None,
        lambda: (S(deleted), S(contracted), S(deleted) <= S(contracted)),
    )
    record(
        "arboricity after deletion at most arboricity after contraction",
        contracted is not None and deleted is not None,
        lambda: (D(deleted), D(contracted), D(deleted) <= D(contracted)),
    )
    record(
        "homogeneous: contraction does not lower arboricity",
        homogeneous and contracted is not None,
        lambda: (D(contracted), d_value, D(contracted) >= d_value),
    )
    record(
        "homogeneous: restriction does not raise strength",
        homogeneous and restricted is not None,
        lambda: (S(restricted), s_value, S(restricted) <= s_value),
    )
    record(
        "restriction meeting the top level does not raise strength",
        restricted is not None and bool(H & e_max),
        lambda: (S(restricted), s_value, S(restricted) <= s_value),
    )
    record(
        "contraction missing part of the core does not lower arboricity",
        contracted is not None and bool(e_min & ~H),
        lambda: (D(contracted), d_value, D(contracted) >= d_value),
    )
    record(
        "contraction below the top level keeps strength",
        contracted is not None and not H & e_max,
        lambda: (S(contracted), s_value, S(contracted) == s_value),
    )
    record(
        "restriction containing the core keeps arboricity",
        restricted is not None and (e_min & ~H) == 0,
        lambda: (D(restricted), d_value, D(restricted) == d_value),
    )
    return {"passed": all(c["passed"] for c in checks), "checks": checks}
