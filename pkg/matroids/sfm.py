"""
Submodular function minimization.

Two strategies:
- exhaustive enumeration of all 2^n subsets for small ground sets (exact)
- Fujishige-Wolfe minimum-norm point over the base polytope for larger ones

The minimum-norm point x* encodes the minimizer lattice: {x* < 0} is the
minimal minimizer and {x* <= 0} the maximal one. Candidate sets are always
re-evaluated exactly, scanning the level sets of x*, so float noise in x* only
affects the order of the scan, never the reported values.
"""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import CapacityError, InputError
from .ground import Mask

LOGGER = logging.getLogger(__name__)

DEFAULT_EXHAUSTIVE_LIMIT = 12
WOLFE_MAX_ITER = 10_000
# Roundoff allowances in Wolfe's major and minor cycles
Z_OPTIMAL = 1e-12
Z_COEFF = 1e-10

SetFunction = Callable[[Mask], Fraction]
PrefixFunction = Callable[[Sequence[int]], Sequence[Fraction]]


@dataclass(frozen=True)
class SfmResult:
    """Minimum value with the minimal and maximal minimizers."""

    minimizer: Mask
    value: Fraction
    maximal_minimizer: Mask


def _affine_minimizer(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Minimum-norm point of the affine hull of the rows of ``points``."""
    m = points.shape[0]
    gram = points @ points.T
    system = np.zeros((m + 1, m + 1))
    system[0, 1:] = 1.0
    system[1:, 0] = 1.0
    system[1:, 1:] = gram
    rhs = np.zeros(m + 1)
    rhs[0] = 1.0
    try:
        solution = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        solution = np.linalg.lstsq(system, rhs, rcond=None)[0]
    coeffs = solution[1:]
    return coeffs, coeffs @ points


def min_norm_point(
    linear_oracle: Callable[[np.ndarray], np.ndarray],
    start: np.ndarray,
    max_iter: int = WOLFE_MAX_ITER,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Wolfe's nearest-point algorithm over a polytope given by a linear oracle.

    Args:
        linear_oracle: Returns a vertex q minimizing <x, q>
        start: Any vertex of the polytope
        max_iter: Major cycle cap

    Returns:
        (x, coefficients, vertices): the nearest point to the origin and its
        convex representation by the active vertices (rows)
    """
    vertices = start.reshape(1, -1).astype(float)
    coeffs = np.array([1.0])
    x = vertices[0].copy()

    for iteration in range(max_iter):
        q = linear_oracle(x)
        if np.any(np.all(np.abs(vertices - q) < Z_COEFF, axis=1)):
            break
        scale = max(float(q @ q), float(np.max(np.einsum("ij,ij->i", vertices, vertices))))
        if x @ q >= x @ x - Z_OPTIMAL * scale:
            break
        vertices = np.vstack((vertices, q))
        coeffs = np.append(coeffs, 0.0)

        # Minor cycle: move to the affine minimizer, dropping vertices as needed
        while True:
            b, y = _affine_minimizer(vertices)
            if np.all(b >= -Z_COEFF):
                coeffs, x = b, y
                break
            negative = b < -Z_COEFF
            theta = np.min(coeffs[negative] / (coeffs[negative] - b[negative]))
            coeffs = theta * b + (1.0 - theta) * coeffs
            keep = coeffs > Z_COEFF
            vertices, coeffs = vertices[keep], coeffs[keep]
            coeffs = coeffs / coeffs.sum()
            x = coeffs @ vertices
    else:
        LOGGER.warning("Min-norm point stopped after %d major cycles", max_iter)

    LOGGER.debug("Min-norm point converged with %d active vertices", len(coeffs))
    return x, coeffs, vertices


def _greedy_vertex(
    weights: np.ndarray, prefix: PrefixFunction
) -> np.ndarray:
    """Vertex of the base polytope minimizing <weights, q> (Edmonds' greedy)."""
    order = np.argsort(weights, kind="mergesort")
    values = prefix([int(i) for i in order])
    q = np.empty(len(weights))
    previous = 0.0
    for i, value in zip(order, values):
        current = float(value)
        q[i] = current - previous
        previous = current
    return q


def _default_prefix(f: SetFunction, base_value: Fraction) -> PrefixFunction:
    def prefix(order: Sequence[int]) -> list[Fraction]:
        values = []
        mask = 0
        for i in order:
            mask |= 1 << i
            values.append(f(mask) - base_value)
        return values

    return prefix


def _exhaustive(f: SetFunction, n: int) -> SfmResult:
    best = f(0)
    minimal = 0
    maximal = 0
    for mask in range(1, 1 << n):
        value = f(mask)
        if value < best:
            best, minimal, maximal = value, mask, mask
        elif value == best:
            minimal &= mask
            maximal |= mask
    return SfmResult(minimizer=minimal, value=best, maximal_minimizer=maximal)


def _min_norm(f: SetFunction, n: int, prefix: Optional[PrefixFunction]) -> SfmResult:
    empty_value = f(0)
    if prefix is None:
        prefix = _default_prefix(f, empty_value)

    def oracle(x: np.ndarray) -> np.ndarray:
        return _greedy_vertex(x, prefix)

    start = oracle(np.zeros(n))
    x, _, _ = min_norm_point(oracle, start)

    # Exact scan over the level sets of x*
    order = [int(i) for i in np.argsort(x, kind="mergesort")]
    chain = prefix(order)
    best = Fraction(0)
    best_short = 0
    best_long = 0
    for k, value in enumerate(chain, start=1):
        if value < best:
            best, best_short, best_long = value, k, k
        elif value == best:
            best_long = k
    minimal = 0
    for i in order[:best_short]:
        minimal |= 1 << i
    maximal = 0
    for i in order[:best_long]:
        maximal |= 1 << i
    return SfmResult(minimizer=minimal, value=best + empty_value, maximal_minimizer=maximal)


def sfm_minimize(
    f: SetFunction,
    n: int,
    prefix: Optional[PrefixFunction] = None,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    max_size: Optional[int] = None,
) -> SfmResult:
    """
    Minimize a submodular set function on subsets of {0, ..., n-1}.

    Args:
        f: Exact set function on masks (submodularity is the caller's responsibility)
        n: Ground set size
        prefix: Optional fast evaluation of f(prefix) - f(empty) along an order
        exhaustive_limit: Largest n solved by full enumeration
        max_size: Refuse ground sets larger than this

    Returns:
        SfmResult with the minimal minimizer, the minimum value and the
        maximal minimizer

    Raises:
        InputError: If n is negative
        CapacityError: If n exceeds max_size
    """
    if n < 0:
        raise InputError(f"Ground set size must be nonnegative, got {n}")
    if max_size is not None and n > max_size:
        raise CapacityError("Ground set too large for minimization", limit=max_size, partial=n)
    if n == 0:
        return SfmResult(minimizer=0, value=f(0), maximal_minimizer=0)
    if n <= exhaustive_limit:
        return _exhaustive(f, n)
    return _min_norm(f, n, prefix)
