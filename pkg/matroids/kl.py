"""
Minimum Kullback-Leibler divergence over the base polytope.

minimize -sum sigma(e) log eta(e) subject to eta in conv(B)

The solver is Frank-Wolfe with away steps. Its linear oracle is the greedy
maximum base for v = sigma / eta, whose v-length minus sigma(E) is the
Frank-Wolfe gap. A corrective Newton phase on the active bases finishes each
face once it is identified. The optimum equals the universal density.
"""

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .core import direct_sum, extend_to_base, greedy_max_weight_base
from .density import Weights, fractional_arboricity, weight_table
from .distributions import BasePmf, incidence_matrix
from .errors import InputError
from .ground import Element, GroundSet, Number, WeightTable, iter_bits, vector_values
from .handles import Matroid
from .universal import is_homogeneous

LOGGER = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200_000
NEWTON_EVERY = 10
NEWTON_STEPS = 8
NEWTON_MAX_ACTIVE = 400
DROP_WEIGHT = 1e-14
BISECTION_STEPS = 60


@dataclass(frozen=True)
class MklSolution:
    density: dict[Element, float]
    value: float
    iterations: int
    duality_gap: float
    converged: bool
    pmf: BasePmf


def mkl_objective(
    eta: Mapping[Element, Number], sigma: Optional[Mapping[Element, Number]] = None
) -> float:
    """
    -sum sigma(e) log eta(e); +inf when some entry is zero.

    Raises:
        InputError: If an entry is negative
    """
    total = 0.0
    for e, value in eta.items():
        value = float(value)
        if value < 0:
            raise InputError(f"Density of {e!r} is negative: {value}")
        weight = 1.0 if sigma is None else float(sigma[e])
        if value == 0:
            return math.inf
        total -= weight * math.log(value)
    return total


def mkl_gradient(
    eta: Mapping[Element, Number], sigma: Optional[Mapping[Element, Number]] = None
) -> dict[Element, float]:
    """Gradient -sigma(e) / eta(e) of the objective."""
    return {
        e: -(1.0 if sigma is None else float(sigma[e])) / float(value) for e, value in eta.items()
    }


def _objective(s: np.ndarray, eta: np.ndarray) -> float:
    if np.any(eta <= 0):
        return math.inf
    return float(-(s @ np.log(eta)))


def _line_search(s: np.ndarray, eta: np.ndarray, d: np.ndarray, gamma_max: float) -> float:
    """Exact step on the convex 1-D restriction by bisection on its derivative."""

    def slope(gamma: float) -> float:
        point = eta + gamma * d
        if np.any(point <= 0):
            return math.inf
        return float(-(s @ (d / point)))

    if slope(gamma_max) <= 0:
        return gamma_max
    lo, hi = 0.0, gamma_max
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0:
            hi = mid
        else:
            lo = mid
    return lo


class _ActiveSet:
    """Bases with positive weight and their incidence rows."""

    def __init__(self, n: int, bases: Sequence[int], weights: Sequence[float]):
        self.n = n
        self.bases = list(bases)
        self.rows = incidence_matrix(self.bases, n)
        self.weights = np.array(weights, dtype=float)

    @property
    def eta(self) -> np.ndarray:
        return self.weights @ self.rows

    def position(self, base: int) -> int:
        try:
            return self.bases.index(base)
        except ValueError:
            self.bases.append(base)
            self.rows = np.vstack((self.rows, incidence_matrix([base], self.n)))
            self.weights = np.append(self.weights, 0.0)
            return len(self.bases) - 1

    def prune(self) -> None:
        keep = self.weights > DROP_WEIGHT
        if np.all(keep):
            return
        self.bases = [b for b, k in zip(self.bases, keep) if k]
        self.rows = self.rows[keep]
        self.weights = self.weights[keep]
        self.weights /= self.weights.sum()


def _initial_bases(M: Matroid, s: np.ndarray) -> list[int]:
    """Max-sigma greedy base plus one covering base per element still uncovered."""
    first = greedy_max_weight_base(M, list(s))
    bases = [first]
    covered = first
    for e in range(M.size):
        if not covered >> e & 1:
            base = extend_to_base(M, 1 << e)
            bases.append(base)
            covered |= base
    return bases


def _newton(active: _ActiveSet, s: np.ndarray) -> None:
    """Damped Newton steps for the objective restricted to the active simplex."""
    m = len(active.bases)
    if m < 2 or m > NEWTON_MAX_ACTIVE:
        return
    for _ in range(NEWTON_STEPS):
        N = active.rows
        eta = active.eta
        current = _objective(s, eta)
        v = s / eta
        grad = -(N @ v)
        H = (N * (s / eta**2)) @ N.T
        kkt = np.zeros((m + 1, m + 1))
        kkt[:m, :m] = H
        kkt[:m, m] = 1.0
        kkt[m, :m] = 1.0
        rhs = np.append(-grad, 0.0)
        step = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:m]
        decrease = step < 0
        alpha = 1.0
        if np.any(decrease):
            alpha = min(1.0, float(np.min(-active.weights[decrease] / step[decrease])))
        improved = False
        while alpha > 1e-12:
            trial = active.weights + alpha * step
            value = _objective(s, trial @ N)
            if value < current:
                active.weights = np.clip(trial, 0.0, None)
                active.weights /= active.weights.sum()
                improved = True
                break
            alpha *= 0.5
        active.prune()
        m = len(active.bases)
        if not improved or m < 2:
            return


def mkl_solve(
    M: Matroid,
    sigma: Weights = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> MklSolution:
    """
    Solve the MKL problem by away-step Frank-Wolfe with corrective Newton steps.

    Args:
        M: Loopless matroid of positive rank
        sigma: Positive weights (unit when None)
        tol: Stop when the Frank-Wolfe gap falls to this value
        max_iter: Iteration cap; the best iterate is returned unconverged

    Returns:
        MklSolution with the density, objective, gap and the base mixture

    Raises:
        InputError: If tol is not positive
        DomainError: If M has loops or rank 0
    """
    if tol <= 0:
        raise InputError(f"Tolerance must be positive, got {tol}")
    M._require_loopless()
    weights = weight_table(M, sigma)
    s = np.array(weights.floats())
    total = float(s.sum())

    start = _initial_bases(M, s)
    active = _ActiveSet(M.size, start, [1.0 / len(start)] * len(start))
    gap = math.inf
    iteration = 0
    converged = False
    while iteration < max_iter:
        iteration += 1
        eta = active.eta
        v = s / eta
        fw_base = greedy_max_weight_base(M, list(v))
        fw_vertex = incidence_matrix([fw_base], M.size)[0]
        gap = float(v @ fw_vertex) - total
        if gap <= tol:
            converged = True
            break

        lengths = active.rows @ v
        away = int(np.argmin(lengths))
        away_gap = total - float(lengths[away])
        w_away = float(active.weights[away])
        if gap >= away_gap or w_away >= 1.0:
            d = fw_vertex - eta
            gamma = _line_search(s, eta, d, 1.0)
            j = active.position(fw_base)
            active.weights *= 1.0 - gamma
            active.weights[j] += gamma
        else:
            gamma_max = w_away / (1.0 - w_away)
            d = eta - active.rows[away]
            gamma = _line_search(s, eta, d, gamma_max)
            active.weights *= 1.0 + gamma
            active.weights[away] -= gamma
            if gamma >= gamma_max:
                active.weights[away] = 0.0
        active.prune()

        if iteration % NEWTON_EVERY == 0:
            _newton(active, s)
        if iteration % 1000 == 0:
            LOGGER.debug("MKL iteration %d: gap %.3e active %d", iteration, gap, len(active.bases))
    else:
        LOGGER.warning("MKL stopped after %d iterations with gap %.3e", max_iter, gap)

    eta = active.eta
    pmf = BasePmf(M.ground, {b: float(w) for b, w in zip(active.bases, active.weights)})
    LOGGER.info("MKL finished in %d iterations, gap %.3e", iteration, gap)
    return MklSolution(
        density=dict(zip(M.ground.elements, (float(x) for x in eta))),
        value=_objective(s, eta),
        iterations=iteration,
        duality_gap=gap,
        converged=converged,
        pmf=pmf,
    )


def _ratios(M: Matroid, weights: WeightTable, eta: Mapping[Element, Number]) -> list:
    values = vector_values(M.ground, eta)
    exact = all(isinstance(x, (int, Fraction)) for x in values)
    out = []
    for e, w, x in zip(M.ground, weights.values, values):
        if x <= 0:
            raise InputError(f"Density of {e!r} must be positive, got {x}")
        out.append(w / Fraction(x) if exact else float(w) / float(x))
    return out


def _close(a: Union[Fraction, float], b: Union[Fraction, float], tol: float) -> bool:
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return a == b
    return abs(float(a) - float(b)) <= tol


def length_certificate(
    M: Matroid,
    eta: Mapping[Element, Number],
    sigma: Weights = None,
    tol: float = 1e-7,
) -> dict:
    """
    Necessary optimality certificate: with v = sigma / eta, the longest base
    under v has length sigma(E). Equality does not prove optimality.
    """
    weights = weight_table(M, sigma)
    v = _ratios(M, weights, eta)
    base = greedy_max_weight_base(M, v)
    longest = sum((v[i] for i in iter_bits(base)), type(v[0])(0))
    return {
        "passed": _close(longest, weights.total, tol),
        "max_length": longest,
        "total_weight": weights.total,
        "longest_base": M.ground.members(base),
        "note": "necessary condition only",
    }


def vmax_core_check(
    M: Matroid,
    eta: Mapping[Element, Number],
    sigma: Weights = None,
    tol: float = 1e-7,
) -> dict:
    """
    The set V_max where v = sigma / eta peaks is tight (eta(V) = r(V)), has
    v_max = sigma(V) / r(V) and equals the core.
    """
    weights = weight_table(M, sigma)
    v = _ratios(M, weights, eta)
    values = vector_values(M.ground, eta)
    top = max(v)
    v_set = 0
    for i, ratio in enumerate(v):
        if _close(ratio, top, tol * max(1.0, float(top))):
            v_set |= 1 << i
    r_v = M._rank(v_set)
    mass = sum((values[i] for i in iter_bits(v_set)), type(values[0])(0))
    _, core = fractional_arboricity(M, weights)
    checks = [
        {"check": "peak set is tight", "passed": _close(mass, r_v, tol)},
        {
            "check": "peak value is the density of its set",
            "passed": _close(top, weights(v_set) / r_v, tol),
        },
        {"check": "peak set is the core", "passed": v_set == core},
    ]
    return {
        "passed": all(c["passed"] for c in checks),
        "v_max": top,
        "v_max_set": M.ground.members(v_set),
        "checks": checks,
    }


def _product_pmf(pmfs: Sequence[BasePmf]) -> BasePmf:
    product = pmfs[0]
    for other in pmfs[1:]:
        ground = GroundSet(product.ground.elements + other.ground.elements)
        product = product.product(other, ground)
    return product


def serial_rule_check(
    parts: Sequence[tuple[Matroid, Weights]],
    tol: float = 1e-8,
    density_tol: float = 1e-6,
    mkl_tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> dict:
    """
    MKL on a direct sum splits over its parts: optimal values add, the sum's
    density restricts to each part's density, and the product of the part
    pmfs is optimal for the sum.
    """
    if not parts:
        raise InputError("Serial rule needs at least one part")
    matroids = [M for M, _ in parts]
    total = direct_sum(matroids)
    sigma: dict = {}
    for M, part_sigma in parts:
        sigma.update(zip(M.ground.elements, weight_table(M, part_sigma).values))

    whole = mkl_solve(total, sigma, tol=mkl_tol, max_iter=max_iter)
    solutions = [mkl_solve(M, s, tol=mkl_tol, max_iter=max_iter) for M, s in parts]
    value_parts = sum(sol.value for sol in solutions)
    additivity = abs(whole.value - value_parts)
    density_error = max(
        abs(whole.density[e] - sol.density[e]) for sol in solutions for e in sol.density
    )

    product = _product_pmf([sol.pmf for sol in solutions])
    r = total.full_rank
    bases_valid = product.ground == total.ground and all(
        b.bit_count() == r and total._rank(b) == r for b in product.masses
    )
    usage = product.usage()
    product_value = mkl_objective(usage, sigma)
    product_ok = bases_valid and abs(product_value - whole.value) <= tol + 10 * density_error

    return {
        "passed": additivity <= tol and density_error <= density_tol and product_ok,
        "value_sum": whole.value,
        "value_parts": [sol.value for sol in solutions],
        "additivity_error": additivity,
        "density_error": density_error,
        "product_pmf": {"bases_valid": bases_valid, "value": product_value},
    }


def gibbs_bound(
    M: Matroid, sigma: Weights = None, value: Optional[float] = None, tol: float = 1e-7
) -> dict:
    """
    Lower bound sigma(E) H(sigma / sigma(E)) - sigma(E) log r(E) on the optimum,
    attained exactly when M is sigma-homogeneous.
    """
    weights = weight_table(M, sigma)
    s = np.array(weights.floats())
    total = float(s.sum())
    p = s / total
    bound = total * float(-(p @ np.log(p))) - total * math.log(M.full_rank)
    if value is None:
        value = mkl_solve(M, weights).value
    homogeneous = is_homogeneous(M, weights)
    tight = abs(value - bound) <= tol * max(1.0, abs(bound))
    return {
        "passed": value >= bound - tol and tight == homogeneous,
        "bound": bound,
        "value": value,
        "tight": tight,
        "homogeneous": homogeneous,
    }

