"""
Universal density and principal partition.

The universal density eta* is built by repeated core contraction: the core A
of the current minor gets eta*(e) = sigma(e) / D, then A is contracted and the
process repeats on what is left. The blocks appear in ascending order of their
level sigma^{-1} eta*.

Desk-scale verifiers (base enumeration) cross-check the result: the weighted
minimum 2-norm point of conv(B), the lexicographic conditions, the dual
relation, exchange sets and the infinity-modulus identity.
"""

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import linprog, nnls

from .core import DEFAULT_ORACLE_LIMIT, dual, enumerate_bases, minor
from .density import Weights, fractional_arboricity, strength, weight_table
from .distributions import BasePmf, incidence_matrix
from .errors import DomainError, InputError
from .ground import DensityVector, Element, Mask, Number, WeightTable, iter_bits, vector_values
from .handles import Matroid
from .sfm import DEFAULT_EXHAUSTIVE_LIMIT, min_norm_point

LOGGER = logging.getLogger(__name__)

LP_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PrincipalPartition:
    """Levels s_1 < ... < s_k with blocks A_i and nested sets E_i = A_i ∪ ... ∪ A_k."""

    levels: tuple[Fraction, ...]
    blocks: tuple[Mask, ...]
    nested_sets: tuple[Mask, ...]
    strength: Fraction
    arboricity: Fraction

    @property
    def tau(self) -> int:
        return math.floor(self.strength)

    @property
    def cover_number(self) -> int:
        return math.ceil(self.arboricity)

    def level_of(self, index: int) -> Fraction:
        for level, block in zip(self.levels, self.blocks):
            if block >> index & 1:
                return level
        raise InputError(f"Index {index} is not covered by the partition")


def _sub_weights(M: Matroid, weights: WeightTable, sub: Matroid) -> WeightTable:
    index = M.ground.index
    return WeightTable(sub.ground, {e: weights.values[index(e)] for e in sub.ground})


def universal_density(
    M: Matroid,
    sigma: Weights = None,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
) -> tuple[DensityVector, PrincipalPartition]:
    """
    Universal density eta* and the principal partition of a weighted matroid.

    Args:
        M: Loopless matroid of positive rank
        sigma: Positive element weights (unit when None)
        exhaustive_limit: Ground size up to which minimization enumerates subsets

    Returns:
        (eta, partition): eta maps each element to an exact Fraction and sums
        to r(E)

    Raises:
        DomainError: If M has loops or rank 0
    """
    weights = weight_table(M, sigma)
    eta: list[Optional[Fraction]] = [None] * M.size
    levels, blocks, nested = [], [], []
    remaining = M.full
    current = M
    while True:
        d_value, core = fractional_arboricity(
            current, _sub_weights(M, weights, current), exhaustive_limit
        )
        core = current.ground.translate(core, M.ground)
        nested.append(remaining)
        blocks.append(core)
        levels.append(1 / d_value)
        for i in iter_bits(core):
            eta[i] = weights.values[i] / d_value
        LOGGER.debug("level %s on %d elements", 1 / d_value, core.bit_count())
        remaining &= ~core
        if not remaining:
            break
        current = minor(M, contract=M.full & ~remaining)

    partition = PrincipalPartition(
        levels=tuple(levels),
        blocks=tuple(blocks),
        nested_sets=tuple(nested),
        strength=1 / levels[-1],
        arboricity=1 / levels[0],
    )
    return dict(zip(M.ground.elements, eta)), partition


def is_homogeneous(M: Matroid, sigma: Weights = None, **kwargs) -> bool:
    """S_sigma(M) == sigma(E) / r(E), compared exactly."""
    weights = weight_table(M, sigma)
    return strength(M, weights, **kwargs)[0] == weights.total / M.full_rank


def _denominator_bound(weights: WeightTable) -> int:
    lcm = 1
    for w in weights.values:
        lcm = math.lcm(lcm, w.denominator)
    return max(1, math.ceil(weights.total * lcm))


def _weighted_min_norm(points: np.ndarray, scale: np.ndarray) -> np.ndarray:
    """argmin sum(eta^2 / scale) over the convex hull of the rows of ``points``."""
    root = np.sqrt(scale)
    scaled = points / root

    def oracle(x: np.ndarray) -> np.ndarray:
        return scaled[int(np.argmin(scaled @ x))]

    y, _, _ = min_norm_point(oracle, scaled[0])
    return y * root


def oracle_min_2norm(
    M: Matroid, sigma: Weights = None, limit: int = DEFAULT_ORACLE_LIMIT
) -> DensityVector:
    """
    Brute-force universal density: minimum of sum sigma^{-1} eta^2 over conv(B).

    The float optimum is rounded to the nearest rational with denominator at
    most ceil(L sigma(E)), L the common denominator of sigma, which bounds every
    denominator of eta*.

    Raises:
        CapacityError: If M has more than ``limit`` bases
    """
    weights = weight_table(M, sigma)
    bases = enumerate_bases(M, limit)
    N = incidence_matrix(bases, M.size)
    eta = _weighted_min_norm(N, np.array(weights.floats()))
    bound = _denominator_bound(weights)
    return {
        e: Fraction(float(v)).limit_denominator(bound) for e, v in zip(M.ground.elements, eta)
    }


def verify_lexicographic(
    M: Matroid, x: Mapping[Element, Number], sigma: Weights = None
) -> dict:
    """
    Check x(S_i) = r(S_i) for every level set S_i = {e : x(e)/sigma(e) <= c_i}.

    These equalities hold exactly when x is the universal density.

    Returns:
        {"passed": bool, "levels": [{"level", "size", "mass", "rank", "passed"}]}
    """
    weights = weight_table(M, sigma)
    values = [Fraction(v) for v in vector_values(M.ground, x)]
    if any(v <= 0 for v in values):
        raise InputError("Lexicographic check needs a strictly positive vector")
    ratios = [v / w for v, w in zip(values, weights.values)]
    levels = []
    for c in sorted(set(ratios)):
        S = 0
        for i, ratio in enumerate(ratios):
            if ratio <= c:
                S |= 1 << i
        mass = sum((values[i] for i in iter_bits(S)), Fraction(0))
        r_s = M._rank(S)
        levels.append(
            {
                "level": c,
                "size": S.bit_count(),
                "mass": mass,
                "rank": r_s,
                "passed": mass == r_s,
            }
        )
    return {"passed": all(level["passed"] for level in levels), "levels": levels}


def _membership_matrix(M: Matroid, limit: int) -> tuple[list[Mask], np.ndarray]:
    bases = enumerate_bases(M, limit)
    return bases, incidence_matrix(bases, M.size)


def dep_set(
    M: Matroid,
    x: Mapping[Element, Number],
    u: Element,
    limit: int = DEFAULT_ORACLE_LIMIT,
) -> Mask:
    """
    dep(x, u) = {v : x + eps (1_u - 1_v) in conv(B) for some eps > 0}.

    One LP per candidate v maximizes eps (capped at 1); v is reported when the
    optimum exceeds 1e-9. u itself belongs to the set when x(u) > 0.

    Raises:
        CapacityError: If M has more than ``limit`` bases
    """
    bases, N = _membership_matrix(M, limit)
    target = np.array([float(v) for v in vector_values(M.ground, x)])
    u_index = M.ground.index(u)
    m, n = N.shape
    result = 0
    if target[u_index] > 0:
        result |= 1 << u_index
    A_eq = np.zeros((n + 1, m + 1))
    A_eq[:n, :m] = N.T
    A_eq[n, :m] = 1.0
    b_eq = np.append(target, 1.0)
    cost = np.zeros(m + 1)
    cost[m] = -1.0
    bounds = [(0, None)] * m + [(0, 1)]
    for v_index in range(n):
        if v_index == u_index:
            continue
        direction = np.zeros(n)
        direction[u_index] = 1.0
        direction[v_index] = -1.0
        A_eq[:n, m] = -direction
        res = linprog(cost, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
        if res.status == 0 and -res.fun > LP_TOLERANCE:
            result |= 1 << v_index
    return result


def witness_pmf(
    M: Matroid, x: Mapping[Element, Number], limit: int = DEFAULT_ORACLE_LIMIT
) -> BasePmf:
    """
    A pmf on bases inducing x, by nonnegative least squares on N^T mu = x.

    Raises:
        DomainError: If x is not in conv(B)
        CapacityError: If M has more than ``limit`` bases
    """
    bases, N = _membership_matrix(M, limit)
    target = np.array([float(v) for v in vector_values(M.ground, x)])
    A = np.vstack((N.T, np.ones(len(bases))))
    b = np.append(target, 1.0)
    mu, residual = nnls(A, b)
    if residual > 1e-8:
        raise DomainError(
            f"Vector is not in the base polytope (residual {residual:.3g})",
            certificate={"residual": float(residual)},
        )
    masses = {base: float(mass) for base, mass in zip(bases, mu) if mass > 1e-15}
    return BasePmf(M.ground, masses)


def infinity_modulus_check(
    M: Matroid,
    sigma: Weights = None,
    limit: int = DEFAULT_ORACLE_LIMIT,
    eta: Optional[DensityVector] = None,
) -> dict:
    """
    min over conv(B) of max sigma^{-1} eta equals max sigma^{-1} eta*.

    Solved as an LP over base pmfs.
    """
    weights = weight_table(M, sigma)
    if eta is None:
        eta, _ = universal_density(M, weights)
    bases, N = _membership_matrix(M, limit)
    m, n = N.shape
    inv = 1.0 / np.array(weights.floats())
    A_ub = np.hstack((N.T * inv[:, None], -np.ones((n, 1))))
    b_ub = np.zeros(n)
    A_eq = np.append(np.ones(m), 0.0).reshape(1, -1)
    cost = np.zeros(m + 1)
    cost[m] = 1.0
    res = linprog(
        cost,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=[1.0],
        bounds=[(0, None)] * (m + 1),
        method="highs",
    )
    top = max(Fraction(eta[e]) / w for e, w in zip(M.ground, weights.values))
    optimum = float(res.fun) if res.status == 0 else math.nan
    return {
        "passed": res.status == 0 and abs(optimum - float(top)) <= 1e-9,
        "lp_optimum": optimum,
        "max_ratio": top,
    }


def dual_density_check(
    M: Matroid, sigma: Weights = None, limit: int = DEFAULT_ORACLE_LIMIT
) -> dict:
    """
    eta* + eta_dual* = sigma, where eta_dual* is the minimum-norm point of the
    complementary family {sigma - 1_B}.

    For unit weights the dual matroid is also solved directly (its loops, the
    coloops of M, get density 0) and eta*(M) + eta*(M*) = 1 is checked.

    Raises:
        InputError: If some weight is below 1
        CapacityError: If M has more than ``limit`` bases
    """
    weights = weight_table(M, sigma)
    if any(w < 1 for w in weights.values):
        raise InputError("Complementary family needs every weight to be at least 1")
    eta, _ = universal_density(M, weights)
    bases, N = _membership_matrix(M, limit)
    scale = np.array(weights.floats())
    complement = _weighted_min_norm(scale[None, :] - N, scale)
    bound = _denominator_bound(weights)
    eta_circ = {
        e: Fraction(float(v)).limit_denominator(bound) for e, v in zip(M.ground, complement)
    }
    family_ok = all(eta[e] + eta_circ[e] == w for e, w in zip(M.ground, weights.values))

    dual_ok = None
    if weights.unit:
        D = dual(M)
        dual_loops = D.loops()
        eta_dual = {e: Fraction(0) for e in M.ground}
        if dual_loops != D.full:
            core = minor(D, delete=dual_loops) if dual_loops else D
            sub_eta, _ = universal_density(core)
            eta_dual.update(sub_eta)
        dual_ok = all(eta[e] + eta_dual[e] == 1 for e in M.ground)

    return {
        "passed": family_ok and dual_ok is not False,
        "family": family_ok,
        "dual_matroid": dual_ok,
        "complement": eta_circ,
    }


def principal_partition_check(
    M: Matroid,
    partition: PrincipalPartition,
    sigma: Weights = None,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
) -> dict:
    """
    Verify the partition structure and the level identities of every
    contraction M / (E - E_i).
    """
    weights = weight_table(M, sigma)
    issues = []
    union = 0
    for block in partition.blocks:
        if union & block:
            issues.append("blocks overlap")
        union |= block
    if union != M.full:
        issues.append("blocks do not cover the ground set")
    if list(partition.levels) != sorted(set(partition.levels)):
        issues.append("levels are not strictly increasing")
    remaining = M.full
    for i, (block, nested) in enumerate(zip(partition.blocks, partition.nested_sets)):
        if nested != remaining:
            issues.append(f"nested set {i + 1} differs from the complement of earlier blocks")
        remaining &= ~block
    d_value = fractional_arboricity(M, weights, exhaustive_limit)[0]
    s_value = strength(M, weights, exhaustive_limit)[0]
    if partition.levels[0] != 1 / d_value:
        issues.append("first level is not 1/D")
    if partition.levels[-1] != 1 / s_value:
        issues.append("last level is not 1/S")
    for i, nested in enumerate(partition.nested_sets):
        sub = minor(M, contract=M.full & ~nested)
        sub_w = _sub_weights(M, weights, sub)
        if fractional_arboricity(sub, sub_w, exhaustive_limit)[0] != 1 / partition.levels[i]:
            issues.append(f"arboricity of contraction {i + 1} is not 1/s_{i + 1}")
        if strength(sub, sub_w, exhaustive_limit)[0] != 1 / partition.levels[-1]:
            issues.append(f"strength of contraction {i + 1} is not 1/s_k")
    return {"passed": not issues, "issues": issues}
