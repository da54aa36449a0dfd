"""
Base pmfs: product-weighted pmfs, maximum entropy, min-det, strict homogeneity,
lambda recovery, truncation averaging and matching decompositions.

Everything here enumerates bases and is meant for desk-scale matroids.
"""

import logging
import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.special import logsumexp

from .core import DEFAULT_ORACLE_LIMIT, components, enumerate_bases, minor, restriction
from .density import Weights, arboricity_or_infinity, fractional_arboricity, weight_table
from .distributions import BasePmf, incidence_matrix
from .errors import CapacityError, DomainError, InputError
from .ground import (
    DensityVector,
    Element,
    Mask,
    Number,
    WeightTable,
    iter_bits,
    to_fraction,
    vector_values,
)
from .handles import Matroid
from .matching import bipartite_perfect_matching
from .sfm import sfm_minimize

LOGGER = logging.getLogger(__name__)

LambdaWeights = dict[Element, Number]

FIT_TOLERANCE = 1e-12
NEWTON_POLISH_STEPS = 50
DIVERGENCE_THRESHOLD = -40.0
ENTROPY_IDENTITY_TOLERANCE = 1e-7


@dataclass(frozen=True)
class EntropyResult:
    pmf: BasePmf
    entropy: float
    support: tuple[Mask, ...]


@dataclass(frozen=True)
class MinDetResult:
    """
    Infimum of sum lambda[B] under prod lambda(e)^sigma(e) = 1.

    ``lam`` is set when the infimum is attained; otherwise ``boundary`` is True
    and ``vanishing`` lists the elements whose weights go to zero. ``entropy``
    is H of the max-entropy pmf inducing beta; ``value`` equals exp(entropy).
    """

    value: float
    lam: Optional[dict[Element, float]]
    boundary: bool
    vanishing: tuple = ()
    entropy: Optional[float] = None


@dataclass(frozen=True)
class StrictHomogeneity:
    strictly_homogeneous: bool
    connected: bool
    criterion: bool
    witness: Optional[dict] = None
    components: tuple = ()
    supports_all_bases: Optional[bool] = None


@dataclass(frozen=True)
class MatchingTerm:
    """coefficient * (uniform pmf 1/n on the cells (i, permutation[i]))."""

    coefficient: Fraction
    permutation: tuple[int, ...]


def lambda_pmf(
    M: Matroid, lam: Mapping[Element, Number], limit: int = DEFAULT_ORACLE_LIMIT
) -> tuple[BasePmf, DensityVector]:
    """
    mu(B) proportional to lambda[B] = prod over B of lambda(e), with its usage.

    Rational lambda gives exact masses.

    Example:
        >>> pmf, usage = lambda_pmf(graphic_k3, {"e1": 1, "e2": 1, "e3": 2})
        >>> [str(usage[e]) for e in ("e1", "e2", "e3")]
        ['3/5', '3/5', '4/5']

    Raises:
        InputError: If some lambda(e) is not positive
        CapacityError: If M has more than ``limit`` bases
    """
    values = vector_values(M.ground, lam)
    if any(x <= 0 for x in values):
        raise InputError("Lambda weights must be strictly positive")
    exact = all(isinstance(x, (int, Fraction)) for x in values)
    bases = enumerate_bases(M, limit)
    if exact:
        values = [Fraction(x) for x in values]
        products = []
        for base in bases:
            p = Fraction(1)
            for i in iter_bits(base):
                p *= values[i]
            products.append(p)
        total = sum(products, Fraction(0))
        masses = {b: p / total for b, p in zip(bases, products)}
    else:
        logs = incidence_matrix(bases, M.size) @ np.log(np.array(values, dtype=float))
        probs = np.exp(logs - logsumexp(logs))
        masses = {b: float(p) for b, p in zip(bases, probs)}
    pmf = BasePmf(M.ground, masses)
    return pmf, pmf.usage()


def normalize_lambda(lam: Mapping[Element, Number], sigma: Mapping[Element, Number]) -> dict:
    """Rescale lambda uniformly so that prod lambda(e)^sigma(e) = 1."""
    total = sum(float(sigma[e]) for e in lam)
    shift = sum(float(sigma[e]) * math.log(float(x)) for e, x in lam.items()) / total
    return {e: float(x) * math.exp(-shift) for e, x in lam.items()}


def supported_bases(
    M: Matroid,
    beta: Mapping[Element, Number],
    limit: int = DEFAULT_ORACLE_LIMIT,
    bases: Optional[list[Mask]] = None,
) -> list[Mask]:
    """
    Bases carried by some pmf inducing beta; empty when beta is not in conv(B).

    One LP over the homogenized cone: maximize sum z_B subject to
    N^T mu = s beta, sum mu = s, z_B <= mu_B, 0 <= z <= 1.
    """
    if bases is None:
        bases = enumerate_bases(M, limit)
    target = np.array([float(x) for x in vector_values(M.ground, beta)])
    N = incidence_matrix(bases, M.size)
    m, n = N.shape
    # variables: mu (m), z (m), s (1)
    A_eq = np.zeros((n + 1, 2 * m + 1))
    A_eq[:n, :m] = N.T
    A_eq[:n, 2 * m] = -target
    A_eq[n, :m] = 1.0
    A_eq[n, 2 * m] = -1.0
    A_ub = np.zeros((m, 2 * m + 1))
    A_ub[:, :m] = -np.eye(m)
    A_ub[:, m : 2 * m] = np.eye(m)
    cost = np.zeros(2 * m + 1)
    cost[m : 2 * m] = -1.0
    bounds = [(0, None)] * m + [(0, 1)] * m + [(0, None)]
    res = linprog(
        cost,
        A_ub=A_ub,
        b_ub=np.zeros(m),
        A_eq=A_eq,
        b_eq=np.zeros(n + 1),
        bounds=bounds,
        method="highs",
    )
    if res.status != 0:
        raise DomainError(f"Support LP failed: {res.message}")
    z = res.x[m : 2 * m]
    return [b for b, value in zip(bases, z) if value > 0.5]


def _infeasibility_certificate(M: Matroid, beta: Mapping[Element, Number]) -> dict:
    values = [
        to_fraction(x, name=f"beta of {e!r}")
        for e, x in zip(M.ground, vector_values(M.ground, beta))
    ]
    for e, x in zip(M.ground, values):
        if x < 0:
            return {"kind": "negative entry", "element": e, "value": x}
    total = sum(values, Fraction(0))
    if total != M.full_rank:
        return {"kind": "sum differs from rank", "sum": total, "rank": M.full_rank}

    def f(mask: Mask) -> Fraction:
        return M._rank(mask) - sum((values[i] for i in iter_bits(mask)), Fraction(0))

    result = sfm_minimize(f, M.size)
    return {
        "kind": "violated rank inequality",
        "set": M.ground.members(result.minimizer),
        "rank": M._rank(result.minimizer),
        "mass": sum((values[i] for i in iter_bits(result.minimizer)), Fraction(0)),
    }


def _fit_log_weights(N: np.ndarray, target: np.ndarray) -> np.ndarray:
    """
    Parameters x of the exponential family p_B ∝ exp(<1_B, x>) with N^T p = target.

    L-BFGS-B on the convex dual log sum exp(N x) - target.x, then Newton polish.
    """

    def dual(x: np.ndarray) -> tuple[float, np.ndarray]:
        logits = N @ x
        lse = logsumexp(logits)
        p = np.exp(logits - lse)
        return float(lse - target @ x), N.T @ p - target

    def moments(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        logits = N @ x
        p = np.exp(logits - logsumexp(logits))
        return p, N.T @ p

    res = minimize(dual, np.zeros(N.shape[1]), jac=True, method="L-BFGS-B")
    x = res.x
    p, mean = moments(x)
    error = float(np.max(np.abs(mean - target)))
    for _ in range(NEWTON_POLISH_STEPS):
        if error <= FIT_TOLERANCE:
            break
        cov = (N.T * p) @ N - np.outer(mean, mean)
        step = np.linalg.lstsq(cov, target - mean, rcond=None)[0]
        alpha = 1.0
        while alpha > 1e-6:
            p_new, mean_new = moments(x + alpha * step)
            error_new = float(np.max(np.abs(mean_new - target)))
            if error_new < error:
                x, p, mean, error = x + alpha * step, p_new, mean_new, error_new
                break
            alpha *= 0.5
        else:
            break
    return x


def max_entropy_pmf(
    M: Matroid, beta: Mapping[Element, Number], limit: int = DEFAULT_ORACLE_LIMIT
) -> EntropyResult:
    """
    The unique maximum-entropy pmf among those inducing beta.

    Its support is the set of bases carried by some beta-inducing pmf, and on
    that support it has the exponential form mu(B) ∝ exp(<1_B, x>).

    Raises:
        DomainError: If beta is not in conv(B); the certificate is a negative
            entry, a sum different from r(E) or a set X with beta(X) > r(X)
        CapacityError: If M has more than ``limit`` bases
    """
    bases = enumerate_bases(M, limit)
    support = supported_bases(M, beta, bases=bases)
    if not support:
        certificate = _infeasibility_certificate(M, beta)
        raise DomainError(
            f"Density vector is not in the base polytope ({certificate['kind']})",
            certificate=certificate,
        )
    if len(support) == 1:
        return EntropyResult(BasePmf(M.ground, {support[0]: Fraction(1)}), 0.0, tuple(support))
    target = np.array([float(x) for x in vector_values(M.ground, beta)])
    N = incidence_matrix(support, M.size)
    x = _fit_log_weights(N, target)
    logits = N @ x
    p = np.exp(logits - logsumexp(logits))
    pmf = BasePmf(M.ground, {b: float(q) for b, q in zip(support, p)})
    LOGGER.debug("Max-entropy pmf on %d of %d bases", len(support), len(bases))
    return EntropyResult(pmf, pmf.entropy(), tuple(support))


def _recession_direction(
    N_supported: np.ndarray, N_other: np.ndarray, sigma: np.ndarray
) -> Optional[np.ndarray]:
    """
    Sparsest (in l1) d with sigma.d = 0, N_S d = 0 and N_T d <= -1 on the
    unsupported bases, as d = plus - minus.
    """
    n = sigma.shape[0]
    rows = [sigma.reshape(1, -1)]
    if len(N_supported):
        rows.append(N_supported)
    A = np.vstack(rows)
    res = linprog(
        np.ones(2 * n),
        A_ub=np.hstack((N_other, -N_other)),
        b_ub=-np.ones(N_other.shape[0]),
        A_eq=np.hstack((A, -A)),
        b_eq=np.zeros(A.shape[0]),
        bounds=[(0, None)] * (2 * n),
        method="highs",
    )
    if res.status != 0:
        return None
    return res.x[:n] - res.x[n:]


def _diverging_elements(N: np.ndarray, beta: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Fallback: run the unconstrained dual and report coordinates that run off."""

    def dual(x: np.ndarray) -> tuple[float, np.ndarray]:
        logits = N @ x
        lse = logsumexp(logits)
        return float(lse - beta @ x), N.T @ np.exp(logits - lse) - beta

    x = minimize(dual, np.zeros(N.shape[1]), jac=True, method="L-BFGS-B").x
    x = x - (sigma @ x) / sigma.sum()
    return x < DIVERGENCE_THRESHOLD


def min_det_solve(
    M: Matroid, sigma: Weights = None, limit: int = DEFAULT_ORACLE_LIMIT
) -> MinDetResult:
    """
    inf sum_B lambda[B] subject to prod lambda(e)^sigma(e) = 1.

    With beta = r(E) sigma / sigma(E), the infimum is attained exactly when
    every base carries some beta-inducing pmf; then lambda = exp(x) for the
    max-entropy parameters shifted to sigma.x = 0 and the value is exp(H).
    Otherwise the weights on the vanishing set E_0 go to zero along a recession
    direction and the infimum is exp(H) of the max-entropy pmf (0 when beta is
    outside conv(B)).

    Raises:
        CapacityError: If M has more than ``limit`` bases
    """
    weights = weight_table(M, sigma)
    r = M.full_rank
    s = np.array(weights.floats())
    beta = {e: w * r / weights.total for e, w in zip(M.ground, weights.values)}
    beta_values = np.array([float(x) for x in beta.values()])
    bases = enumerate_bases(M, limit)
    support = supported_bases(M, beta, bases=bases)

    if len(support) == len(bases):
        N = incidence_matrix(bases, M.size)
        if len(bases) == 1:
            x = np.zeros(M.size)
        else:
            x = _fit_log_weights(N, beta_values)
        x = x - (s @ x) / s.sum()
        logits = N @ x
        value = float(np.exp(logsumexp(logits)))
        entropy = max_entropy_pmf(M, beta, limit).entropy
        if abs(value - math.exp(entropy)) > ENTROPY_IDENTITY_TOLERANCE * max(1.0, value):
            LOGGER.warning(
                "Min-det value %.12g differs from exp(H) = %.12g of the max-entropy pmf",
                value,
                math.exp(entropy),
            )
        lam = dict(zip(M.ground.elements, (float(v) for v in np.exp(x))))
        return MinDetResult(value=value, lam=lam, boundary=False, entropy=entropy)

    supported = set(support)
    N_s = incidence_matrix(support, M.size)
    N_t = incidence_matrix([b for b in bases if b not in supported], M.size)
    direction = _recession_direction(N_s, N_t, s)
    if direction is not None:
        vanishing = direction < -1e-9
    else:
        LOGGER.warning("Recession LP failed; reading the vanishing set off diverging iterates")
        vanishing = _diverging_elements(incidence_matrix(bases, M.size), beta_values, s)
    vanishing_elements = tuple(e for e, flag in zip(M.ground, vanishing) if flag)
    if support:
        entropy = max_entropy_pmf(M, beta, limit).entropy
        value = math.exp(entropy)
    else:
        entropy, value = None, 0.0
    LOGGER.info("Min-det infimum not attained; vanishing set %r", vanishing_elements)
    return MinDetResult(
        value=value, lam=None, boundary=True, vanishing=vanishing_elements, entropy=entropy
    )


def _sub_weights(M: Matroid, weights: WeightTable, sub: Matroid) -> WeightTable:
    index = M.ground.index
    return WeightTable(sub.ground, {e: weights.values[index(e)] for e in sub.ground})


def _connected_strict(M: Matroid, weights: WeightTable) -> tuple[bool, Optional[dict]]:
    """theta(A) < theta(E) for every proper A of positive rank, for loopless M."""
    theta = weights.total / M.full_rank
    d_value, core = fractional_arboricity(M, weights)
    if d_value != theta:
        return False, {"set": M.ground.members(core), "density": d_value, "theta": theta}
    if M.size == 1:
        return True, None
    for i in range(M.size):
        sub = minor(M, delete=1 << i)
        d_sub = arboricity_or_infinity(sub, _sub_weights(M, weights, sub))
        if d_sub >= theta:
            core_sub = fractional_arboricity(sub, _sub_weights(M, weights, sub))[1]
            return False, {
                "set": sub.ground.members(core_sub),
                "density": d_sub,
                "theta": theta,
            }
    return True, None


def is_strictly_homogeneous(
    M: Matroid, sigma: Weights = None, limit: int = DEFAULT_ORACLE_LIMIT
) -> StrictHomogeneity:
    """
    Whether some product weights lambda make the usage of mu_lambda parallel to sigma.

    Connected M: exactly when theta(A) < theta(E) for every proper A of positive
    rank. Disconnected M: every component passes that test and all components
    share one theta. The whole-matroid strict test is reported as ``criterion``;
    when bases fit under ``limit`` the report also states whether every base
    carries a pmf inducing the sigma-parallel density.

    Raises:
        DomainError: If M has loops or rank 0
    """
    M._require_loopless()
    weights = weight_table(M, sigma)
    parts = components(M)
    criterion, witness = _connected_strict(M, weights)
    if len(parts) == 1:
        verdict = criterion
        reports = ()
    else:
        reports = []
        thetas = set()
        verdict = True
        for part in parts:
            sub = restriction(M, part)
            sub_w = _sub_weights(M, weights, sub)
            ok, part_witness = _connected_strict(sub, sub_w)
            theta = sub_w.total / sub.full_rank
            thetas.add(theta)
            reports.append(
                {"elements": sub.ground.members(sub.full), "theta": theta, "strict": ok}
            )
            verdict = verdict and ok
            if not ok and witness is None:
                witness = part_witness
        if len(thetas) > 1:
            verdict = False
        reports = tuple(reports)
        if verdict:
            witness = None

    supports_all = None
    try:
        bases = enumerate_bases(M, limit)
        r = M.full_rank
        beta = {e: w * r / weights.total for e, w in zip(M.ground, weights.values)}
        supports_all = len(supported_bases(M, beta, bases=bases)) == len(bases)
    except CapacityError:
        LOGGER.info("Skipping support confirmation: too many bases")
    return StrictHomogeneity(
        strictly_homogeneous=verdict,
        connected=len(parts) == 1,
        criterion=criterion,
        witness=witness,
        components=reports,
        supports_all_bases=supports_all,
    )


def lambda_recover(
    M: Matroid, beta: Mapping[Element, Number], limit: int = DEFAULT_ORACLE_LIMIT
) -> dict[Element, float]:
    """
    Product weights lambda with mu_lambda the max-entropy pmf of beta.

    Solves log mu(B) = sum over B of log lambda(e) + c by least squares; lambda
    is unique up to one rescaling per component, fixed by lambda = 1 on the
    first element of each component.

    Raises:
        DomainError: If some base is carried by no beta-inducing pmf
    """
    result = max_entropy_pmf(M, beta, limit)
    bases = enumerate_bases(M, limit)
    supported = set(result.support)
    for base in bases:
        if base not in supported:
            raise DomainError(
                f"Base {M.ground.members(base)!r} is carried by no pmf inducing the density",
                certificate={"base": M.ground.members(base)},
            )
    N = incidence_matrix(bases, M.size)
    masses = np.array([float(result.pmf.masses[b]) for b in bases])
    system = np.hstack((N, np.ones((len(bases), 1))))
    solution, *_ = np.linalg.lstsq(system, np.log(masses), rcond=None)
    residual = float(np.max(np.abs(system @ solution - np.log(masses))))
    if residual > 1e-7:
        raise DomainError(f"Masses are not of product form (residual {residual:.3g})")
    x = solution[: M.size]
    for part in components(M):
        first = next(iter_bits(part))
        shift = x[first]
        for i in iter_bits(part):
            x[i] -= shift
    return dict(zip(M.ground.elements, (float(v) for v in np.exp(x))))


def truncation_pmf(M: Matroid, pmf: BasePmf, t: int) -> BasePmf:
    """
    Spread each base's mass evenly over its t-subsets (bases of the t-truncation).

    For a pmf with constant usage r/|E| the result has constant usage t/|E|.
    """
    r = M.full_rank
    if not 1 <= t <= r:
        raise InputError(f"Truncation level must lie in [1, {r}], got {t}")
    if pmf.ground != M.ground:
        raise InputError("Pmf is over a different ground set")
    share = math.comb(r, t)
    masses: dict = {}
    for base, mass in pmf.masses.items():
        part = Fraction(mass) / share if pmf.exact else float(mass) / share
        members = list(iter_bits(base))
        for chosen in _subsets(members, t):
            masses[chosen] = masses.get(chosen, 0) + part
    return BasePmf(M.ground, masses)


def _subsets(members: Sequence[int], t: int) -> Iterator[Mask]:
    for combo in combinations(members, t):
        mask = 0
        for i in combo:
            mask |= 1 << i
        yield mask


def _as_fraction_matrix(u: Sequence[Sequence[Number]]) -> list[list[Fraction]]:
    n = len(u)
    if n == 0 or any(len(row) != n for row in u):
        raise InputError("Mass matrix must be square and nonempty")
    matrix = [
        [to_fraction(x, name=f"u[{i}][{j}]") for j, x in enumerate(row)]
        for i, row in enumerate(u)
    ]
    for i, row in enumerate(matrix):
        for j, x in enumerate(row):
            if x < 0:
                raise InputError(f"Mass u[{i}][{j}] is negative")
    share = Fraction(1, n)
    for i in range(n):
        if sum(matrix[i]) != share:
            raise InputError(f"Row {i} sums to {sum(matrix[i])}, expected {share}")
        column = sum(matrix[k][i] for k in range(n))
        if column != share:
            raise InputError(f"Column {i} sums to {column}, expected {share}")
    return matrix


def rank1_union_decompose(u: Sequence[Sequence[Number]]) -> list[MatchingTerm]:
    """
    Write a pmf on the n x n cells with all marginals 1/n as a convex
    combination of uniform pmfs on perfect matchings.

    Each round takes the smallest positive entry (ties broken by position),
    finds a perfect matching through it on the support, and removes that
    matching with the entry's value. At most n^2 rounds.

    Example:
        >>> terms = rank1_union_decompose([[0.3, 0.2], [0.2, 0.3]])
        >>> [(str(t.coefficient), t.permutation) for t in terms]
        [('2/5', (1, 0)), ('3/5', (0, 1))]

    Raises:
        InputError: If u is negative or some row or column does not sum to 1/n
    """
    remaining = _as_fraction_matrix(u)
    n = len(remaining)
    terms: list[MatchingTerm] = []
    for _ in range(n * n):
        cells = [(x, i, j) for i, row in enumerate(remaining) for j, x in enumerate(row) if x > 0]
        if not cells:
            break
        value, i0, j0 = min(cells)
        rows = [i for i in range(n) if i != i0]
        columns = [j for j in range(n) if j != j0]
        edges = [(i, j) for (_, i, j) in cells if i != i0 and j != j0]
        result = bipartite_perfect_matching(rows, columns, edges)
        if not result.perfect:
            raise DomainError(
                "Support has no perfect matching through the smallest entry",
                certificate={"violator": sorted(result.violator)},
            )
        permutation = dict(result.matching)
        permutation[i0] = j0
        for i, j in permutation.items():
            remaining[i][j] -= value
        terms.append(MatchingTerm(n * value, tuple(permutation[i] for i in range(n))))
    LOGGER.debug("Decomposed into %d matchings", len(terms))
    return terms


def recompose(terms: Sequence[MatchingTerm], n: int) -> list[list[Fraction]]:
    """Sum of coefficient / n on each matched cell."""
    matrix = [[Fraction(0)] * n for _ in range(n)]
    for term in terms:
        for i, j in enumerate(term.permutation):
            matrix[i][j] += term.coefficient / n
    return matrix
