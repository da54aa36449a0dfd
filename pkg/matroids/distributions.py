"""
Probability mass functions over bases and their induced element usage.
"""

import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import InputError
from .ground import DensityVector, GroundSet, Mask, iter_bits

Mass = Union[Fraction, float]

MASS_TOLERANCE = 1e-6


@dataclass(frozen=True)
class BasePmf:
    """
    Masses on bases (masks over ``ground``).

    Rational masses give an exact usage vector; any float mass switches the
    whole computation to floats. Masses must sum to 1, exactly when rational
    and within MASS_TOLERANCE otherwise.
    """

    ground: GroundSet
    masses: Mapping[Mask, Mass]

    def __post_init__(self):
        for base, mass in self.masses.items():
            self.ground.validate(base)
            if mass < 0:
                raise InputError(f"Negative mass {mass} on base {self.ground.members(base)!r}")
        total = self.total
        if self.exact and total != 1:
            raise InputError(f"Masses sum to {total}, not 1")
        if not self.exact and abs(total - 1) > MASS_TOLERANCE:
            raise InputError(f"Masses sum to {total:.12g}, not 1")

    @property
    def exact(self) -> bool:
        return all(isinstance(m, (int, Fraction)) for m in self.masses.values())

    @property
    def total(self) -> Mass:
        if self.exact:
            return sum(self.masses.values(), Fraction(0))
        return float(sum(float(m) for m in self.masses.values()))

    @property
    def support(self) -> list[Mask]:
        return sorted(base for base, mass in self.masses.items() if mass > 0)

    def usage(self) -> DensityVector:
        """Induced element usage N^T mu."""
        n = self.ground.size
        if self.exact:
            values = [Fraction(0)] * n
        else:
            values = [0.0] * n
        for base, mass in self.masses.items():
            if not mass:
                continue
            if not self.exact:
                mass = float(mass)
            for i in iter_bits(base):
                values[i] += mass
        return dict(zip(self.ground.elements, values))

    def entropy(self) -> float:
        """Shannon entropy with 0 log 0 = 0."""
        total = 0.0
        for mass in self.masses.values():
            p = float(mass)
            if p > 0:
                total -= p * math.log(p)
        return total

    def as_arrays(self) -> tuple[list[Mask], np.ndarray]:
        bases = sorted(self.masses)
        return bases, np.array([float(self.masses[b]) for b in bases])

    def product(self, other: "BasePmf", ground: GroundSet) -> "BasePmf":
        """Product pmf on a direct sum whose ground lists self's elements then other's."""
        offset = self.ground.size
        if ground.elements != self.ground.elements + other.ground.elements:
            raise InputError("Product ground must concatenate the two part grounds")
        masses = {}
        for first, p in self.masses.items():
            for second, q in other.masses.items():
                masses[first | (second << offset)] = p * q
        return BasePmf(ground, masses)


def incidence_matrix(bases: list[Mask], n: int) -> np.ndarray:
    """Rows are base indicator vectors (the matrix N)."""
    N = np.zeros((len(bases), n))
    for row, base in enumerate(bases):
        for i in iter_bits(base):
            N[row, i] = 1.0
    return N
