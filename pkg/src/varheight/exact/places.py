"""Places of Q and normalized absolute values.

Absolute values are normalized so that the product formula holds with all
local degrees equal to 1: ``|p|_p = 1/p`` and the archimedean place is the
ordinary absolute value.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from sympy import factorint, isprime

from .errors import DomainError
from .interval import RealInterval
from .poly import IntPolynomial


@dataclass(frozen=True, order=True)
class Place:
    """The archimedean place (``p is None``) or the p-adic place for a prime ``p``."""

    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None and (self.p < 2 or not isprime(self.p)):
            raise DomainError(f"{self.p} is not prime")

    @classmethod
    def archimedean(cls) -> "Place":
        return cls(None)

    @classmethod
    def finite(cls, p: int) -> "Place":
        return cls(p)

    @property
    def is_archimedean(self) -> bool:
        return self.p is None

    @property
    def local_degree(self) -> int:
        # base field is Q, so n_v = 1 at every place
        return 1

    def __str__(self) -> str:
        return "inf" if self.p is None else str(self.p)


INFINITY = Place.archimedean()


def valuation(x: Union[int, Fraction], p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    q = Fraction(x)
    if q == 0:
        raise DomainError("valuation of 0")
    v = 0
    n, d = q.numerator, q.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def abs_at_place(x: Union[int, Fraction], v: Place) -> Union[Fraction, RealInterval]:
    """``|x|_v``: an exact rational at finite places, an interval at infinity."""
    q = Fraction(x)
    if q == 0:
        raise DomainError("absolute value of 0 is excluded (log undefined)")
    if v.is_archimedean:
        return RealInterval.exact(abs(q))
    return Fraction(v.p) ** (-valuation(q, v.p))


def poly_sup_norm(f: IntPolynomial, v: Place) -> Union[Fraction, RealInterval]:
    """``max |c|_v`` over the nonzero coefficients of ``f``."""
    if f.is_zero():
        raise DomainError("norm of the zero polynomial")
    if v.is_archimedean:
        return RealInterval.exact(f.sup_norm_inf())
    return max(abs_at_place(c, v) for c in f.nonzero_coeffs())


class LogLattice(Counter):
    """Formal integer combination ``sum n_p log p`` over primes ``p``.

    Used to check the product formula symbolically: the sum over all places
    of ``log|x|_v`` is the zero combination.
    """

    def __add__(self, other):
        out = LogLattice(self)
        for k, val in other.items():
            out[k] = out.get(k, 0) + val
        return LogLattice({k: val for k, val in out.items() if val})

    def is_zero(self) -> bool:
        return all(val == 0 for val in self.values())

    def to_interval(self) -> RealInterval:
        total = RealInterval.exact(0)
        for p, n in self.items():
            total = total + RealInterval.log_of(p) * n
        return total


def log_abs_symbolic(x: Union[int, Fraction], v: Place) -> LogLattice:
    """``log|x|_v`` as a :class:`LogLattice` element."""
    q = Fraction(x)
    if q == 0:
        raise DomainError("log|0| is undefined")
    if v.is_archimedean:
        out = LogLattice()
        for p, e in factorint(abs(q.numerator)).items():
            out[p] += e
        for p, e in factorint(q.denominator).items():
            out[p] -= e
        return LogLattice({k: val for k, val in out.items() if val})
    e = valuation(q, v.p)
    return LogLattice({v.p: -e} if e else {})


def relevant_places(x: Union[int, Fraction]) -> list[Place]:
    """The archimedean place plus every prime dividing numerator or denominator."""
    q = Fraction(x)
    primes = set(factorint(abs(q.numerator))) | set(factorint(q.denominator))
    primes.discard(1)
    return [INFINITY] + [Place(p) for p in sorted(primes)]


def product_formula_sum(x: Union[int, Fraction]) -> LogLattice:
    """``sum_v log|x|_v`` over all places (zero for every nonzero x)."""
    total = LogLattice()
    for v in relevant_places(x):
        total = total + log_abs_symbolic(x, v)
    return total
