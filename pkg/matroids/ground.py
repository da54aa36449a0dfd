"""
Ground sets, subset masks and element-indexed vectors.

Subsets are plain int bitmasks: bit i is set when the i-th element of the
GroundSet belongs to the subset. Weight and density vectors are dicts keyed by
element identifier and ordered by the ground set.
"""

from collections.abc import Hashable, Iterable, Iterator, Mapping, Sequence
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

from .errors import InputError

Mask = int
Element = Hashable
WeightVector = dict[Element, Fraction]
DensityVector = dict[Element, Fraction]
Number = Union[int, float, Fraction]


def iter_bits(mask: Mask) -> Iterator[int]:
    """Yield the indices of set bits in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: Mask) -> int:
    return mask.bit_count()


class GroundSet:
    """
    Ordered, immutable collection of unique element identifiers.

    The order fixed at construction is used for every mask and vector.

    Example:
        >>> ground = GroundSet(["a", "b", "c"])
        >>> ground.mask(["a", "c"])
        5
        >>> ground.members(5)
        ['a', 'c']
    """

    __slots__ = ("_elements", "_index", "_full")

    def __init__(self, elements: Iterable[Element]):
        elements = tuple(elements)
        if not elements:
            raise InputError("Ground set must be nonempty")
        index = {}
        for i, element in enumerate(elements):
            if element in index:
                raise InputError(f"Duplicate element identifier: {element!r}")
            index[element] = i
        self._elements = elements
        self._index = index
        self._full = (1 << len(elements)) - 1

    @property
    def elements(self) -> tuple:
        return self._elements

    @property
    def size(self) -> int:
        return len(self._elements)

    @property
    def full(self) -> Mask:
        return self._full

    def __len__(self) -> int:
        return len(self._elements)

    def __iter__(self) -> Iterator[Element]:
        return iter(self._elements)

    def __contains__(self, element: object) -> bool:
        return element in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroundSet) and self._elements == other._elements

    def __hash__(self) -> int:
        return hash(self._elements)

    def __repr__(self) -> str:
        return f"GroundSet({list(self._elements)!r})"

    def index(self, element: Element) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise InputError(f"Element not in ground set: {element!r}") from None

    def bit(self, element: Element) -> Mask:
        return 1 << self.index(element)

    def mask(self, elements: Iterable[Element]) -> Mask:
        """Build the mask of a collection of element identifiers."""
        result = 0
        for element in elements:
            result |= 1 << self.index(element)
        return result

    def members(self, mask: Mask) -> list:
        """List the identifiers in a mask, in ground order."""
        return [self._elements[i] for i in iter_bits(mask)]

    def validate(self, mask: Mask) -> Mask:
        if not isinstance(mask, int) or mask < 0 or mask & ~self._full:
            raise InputError(f"Subset mask {mask!r} is not within a ground set of size {self.size}")
        return mask

    def translate(self, mask: Mask, target: "GroundSet") -> Mask:
        """Re-express a mask over another ground set sharing the same identifiers."""
        return target.mask(self._elements[i] for i in iter_bits(mask))


def to_fraction(value: Number, name: str = "value") -> Fraction:
    """Coerce ints, Fractions, decimal strings and finite floats to Fraction."""
    if isinstance(value, bool):
        raise InputError(f"{name} must be numeric, got {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"{name} is not a rational number: {value!r}") from e
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise InputError(f"{name} must be finite, got {value!r}")
        return Fraction(value).limit_denominator(10**12)
    raise InputError(f"{name} must be numeric, got {value!r}")


def weight_vector(
    ground: GroundSet, sigma: Optional[Mapping[Element, Number]] = None
) -> WeightVector:
    """
    Normalize element weights to a ground-ordered dict of positive Fractions.

    Args:
        ground: Ground set the weights refer to
        sigma: Mapping element -> weight; None means unit weights

    Returns:
        Dict element -> Fraction in ground order

    Raises:
        InputError: If an element is missing, unknown or not strictly positive
    """
    if sigma is None:
        return {e: Fraction(1) for e in ground}
    unknown = [e for e in sigma if e not in ground]
    if unknown:
        raise InputError(f"Weights given for unknown elements: {unknown[:5]!r}")
    result = {}
    for e in ground:
        if e not in sigma:
            raise InputError(f"Missing weight for element {e!r}")
        w = to_fraction(sigma[e], name=f"weight of {e!r}")
        if w <= 0:
            raise InputError(f"Weight of {e!r} must be positive, got {w}")
        result[e] = w
    return result


class WeightTable:
    """Fast subset sums of a weight vector over masks."""

    __slots__ = ("values", "unit", "total")

    def __init__(self, ground: GroundSet, sigma: Optional[Mapping[Element, Number]] = None):
        weights = weight_vector(ground, sigma)
        self.values: tuple[Fraction, ...] = tuple(weights[e] for e in ground)
        self.unit = all(w == 1 for w in self.values)
        self.total: Fraction = sum(self.values, Fraction(0))

    def __call__(self, mask: Mask) -> Fraction:
        if self.unit:
            return Fraction(mask.bit_count())
        return sum((self.values[i] for i in iter_bits(mask)), Fraction(0))

    def floats(self) -> list[float]:
        return [float(w) for w in self.values]


def density_vector(ground: GroundSet, values: Sequence[Number]) -> DensityVector:
    """Pair index-aligned values with ground identifiers."""
    if len(values) != ground.size:
        raise InputError(f"Expected {ground.size} values, got {len(values)}")
    return dict(zip(ground.elements, values))


def vector_values(ground: GroundSet, vector: Mapping[Element, Number]) -> list:
    """Index-aligned values of a vector; missing elements raise InputError."""
    try:
        return [vector[e] for e in ground]
    except KeyError as e:
        raise InputError(f"Vector has no entry for element {e.args[0]!r}") from None


def restrict_vector(vector: Mapping[Element, Number], ground: GroundSet) -> dict:
    return {e: vector[e] for e in ground}


def format_fraction(value: Fraction) -> str:
    """Lowest-terms "p/q" text; integers print without a denominator."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
