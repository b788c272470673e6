"""Projective points over Q and their Weil heights."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Optional, Sequence, Union

from .exact import DomainError, RealInterval

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class ProjPointQ:
    """A point of P^N(Q) with coprime integer coordinates, first nonzero one positive."""

    coords: tuple

    def __post_init__(self):
        if len(self.coords) < 2:
            raise DomainError("projective points need at least two coordinates")
        if not any(self.coords):
            raise DomainError("not a projective point")
        if reduce(math.gcd, self.coords) != 1:
            raise DomainError(f"coordinates {self.coords} are not coprime")
        first = next(c for c in self.coords if c)
        if first < 0:
            raise DomainError("first nonzero coordinate must be positive")

    @property
    def dimension(self) -> int:
        return len(self.coords) - 1

    def max_abs(self) -> int:
        """``max |x_i|``, the exact integer whose log is the height."""
        return max(abs(c) for c in self.coords)

    def __str__(self) -> str:
        return "[" + " : ".join(str(c) for c in self.coords) + "]"


def normalize_point(raw: Sequence[Rational]) -> ProjPointQ:
    """Clear denominators, divide out the gcd and make the first nonzero entry positive."""
    vals = [Fraction(x) for x in raw]
    if not any(vals):
        raise DomainError("not a projective point")
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for v in vals), 1)
    ints = [int(v * den) for v in vals]
    return ProjPointQ(_primitive_ints(ints))


def _primitive_ints(ints: Sequence[int]) -> tuple:
    g = reduce(math.gcd, ints)
    first = next(c for c in ints if c)
    if first < 0:
        g = -g
    return tuple(c // g for c in ints)


def point_from_ints(ints: Sequence[int]) -> ProjPointQ:
    """Normalize an integer tuple (fast path of :func:`normalize_point`)."""
    if not any(ints):
        raise DomainError("not a projective point")
    return ProjPointQ(_primitive_ints(ints))


def affine_point(t: Optional[Rational]) -> ProjPointQ:
    """``t`` as the point ``[t : 1]`` of P^1, with ``None`` standing for ``[1 : 0]``."""
    if t is None:
        return ProjPointQ((1, 0))
    q = Fraction(t)
    return point_from_ints((q.numerator, q.denominator))


def weil_height(P: ProjPointQ) -> RealInterval:
    """``log max |x_i|`` for the normalized integer coordinates."""
    return RealInterval.log_of(P.max_abs())


def height_of_rational(t: Optional[Rational]) -> RealInterval:
    """Standard height on P^1: ``h(p/q) = log max(|p|, |q|)``; ``h(None) = 0`` for infinity."""
    return weil_height(affine_point(t))


def height_bound_int(t: Optional[Rational]) -> int:
    """``max(|p|, |q|)`` for ``t = p/q`` in lowest terms (1 at infinity)."""
    return affine_point(t).max_abs()


def tuple_height(c: Iterable[Rational]) -> RealInterval:
    """Weil height of a nonzero tuple viewed as a projective point."""
    vals = list(c)
    if len(vals) == 1:
        if Fraction(vals[0]) == 0:
            raise DomainError("height of the zero tuple")
        return RealInterval.exact(0)
    return weil_height(normalize_point(vals))


def tuple_height_int(c: Iterable[int]) -> int:
    """Exact ``max |x_i|`` of the primitive integer tuple proportional to ``c``."""
    vals = [int(x) for x in c if x]
    if not vals:
        raise DomainError("height of the zero tuple")
    g = reduce(math.gcd, vals)
    return max(abs(v) for v in vals) // abs(g)
