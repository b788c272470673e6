"""Points of P^N over Q(t): primitive polynomial tuples and their heights.

A point is stored as a tuple of integer polynomials with no common factor
in Z[t] (so both the polynomial gcd and the integer content are 1).  The
geometric height is the largest coordinate degree, the arithmetic height
is the Weil height of the full coefficient tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

from .exact import DomainError, IntPolynomial, RealInterval, poly_gcd_many
from .exact.interval import log2_interval
from .heights_q import ProjPointQ, Rational, point_from_ints, tuple_height, tuple_height_int

RawCoord = Union[IntPolynomial, int, Fraction, Tuple]


@dataclass(frozen=True)
class ProjPointQt:
    coords: Tuple[IntPolynomial, ...]

    def __post_init__(self):
        if len(self.coords) < 2:
            raise DomainError("projective points need at least two coordinates")
        if all(c.is_zero() for c in self.coords):
            raise DomainError("not a projective point")

    @property
    def dimension(self) -> int:
        return len(self.coords) - 1

    def max_coeff(self) -> int:
        return max(c.sup_norm_inf() for c in self.coords)

    def all_coeffs(self) -> list[int]:
        out: list[int] = []
        for c in self.coords:
            out.extend(c.coeffs)
        return out

    def to_strings(self) -> list[list[str]]:
        """Serialization: one list of decimal coefficient strings per coordinate."""
        return [c.to_strings() for c in self.coords]

    @classmethod
    def from_strings(cls, data: Sequence[Sequence[str]]) -> "ProjPointQt":
        return normalize_qt([IntPolynomial.from_strings(c) for c in data])

    def __str__(self) -> str:
        return "[" + " : ".join(str(c) for c in self.coords) + "]"


def _as_fraction_pair(x: RawCoord) -> tuple[IntPolynomial, IntPolynomial]:
    """Numerator/denominator pair in Z[t] for a raw coordinate."""
    if isinstance(x, IntPolynomial):
        return x, IntPolynomial.constant(1)
    if isinstance(x, int):
        return IntPolynomial.constant(x), IntPolynomial.constant(1)
    if isinstance(x, Fraction):
        return IntPolynomial.constant(x.numerator), IntPolynomial.constant(x.denominator)
    if isinstance(x, tuple) and len(x) == 2:
        num, den = x
        n_num, d_num = _as_fraction_pair(num)
        n_den, d_den = _as_fraction_pair(den)
        if n_den.is_zero():
            raise DomainError("zero denominator")
        return n_num * d_den, d_num * n_den
    raise TypeError(f"cannot interpret {x!r} as a rational function")


def primitive_tuple(polys: Sequence[IntPolynomial]) -> tuple[IntPolynomial, tuple[IntPolynomial, ...]]:
    """Divide out the common factor; returns ``(s, reduced)`` with ``polys = s * reduced``.

    ``reduced`` has the leading coefficient of its first nonzero entry positive.
    """
    if all(p.is_zero() for p in polys):
        raise DomainError("not a projective point")
    g = poly_gcd_many(polys)
    if g.degree == 0 and g.leading == 1:
        reduced = tuple(polys)
    else:
        reduced = tuple(p // g for p in polys)
    first = next(p for p in reduced if not p.is_zero())
    if first.leading < 0:
        reduced = tuple(-p for p in reduced)
        g = -g
    return g, reduced


def normalize_qt(raw: Sequence[RawCoord]) -> ProjPointQt:
    """Normalize rational-function coordinates to a primitive integer-polynomial tuple."""
    pairs = [_as_fraction_pair(x) for x in raw]
    if all(n.is_zero() for n, _ in pairs):
        raise DomainError("not a projective point")
    # multiply through by every denominator; the gcd step removes the excess
    polys = []
    for i, (num, _) in enumerate(pairs):
        acc = num
        for j, (_, den) in enumerate(pairs):
            if j != i:
                acc = acc * den
        polys.append(acc)
    _, reduced = primitive_tuple(polys)
    return ProjPointQt(reduced)


def qt_from_ints(polys: Sequence[IntPolynomial]) -> ProjPointQt:
    return ProjPointQt(primitive_tuple(polys)[1])


def geom_height(P: ProjPointQt) -> int:
    return max(c.degree for c in P.coords if not c.is_zero())


def arith_height(P: ProjPointQt) -> RealInterval:
    return tuple_height(P.all_coeffs())


def total_height(P: ProjPointQt) -> RealInterval:
    return arith_height(P) + geom_height(P)


def specialize(P: ProjPointQt, t: Optional[Rational]) -> ProjPointQ:
    """Evaluate the degree-``h^geom`` homogenization at ``[t : 1]`` (``None`` = ``[1 : 0]``)."""
    D = geom_height(P)
    if t is None:
        x0, x1 = 1, 0
    else:
        q = Fraction(t)
        x0, x1 = q.numerator, q.denominator
    vals = [c.eval_homogeneous(x0, x1, D) for c in P.coords]
    # primitive tuples have no common zero on P^1
    assert any(vals), "primitive tuple vanished identically at a parameter"
    return point_from_ints(vals)


@dataclass(frozen=True)
class SpecializationBounds:
    """``lower <= h^geom(P) h(t) - h(P_t) <= upper`` for every parameter ``t``.

    When ``degenerate`` is set the point is constant and ``h(P_t) = exact_height``.
    """

    lower: RealInterval
    upper: RealInterval
    degenerate: bool = False
    exact_height: Optional[RealInterval] = None


def specialization_bounds(P: ProjPointQt) -> SpecializationBounds:
    D = geom_height(P)
    ha = arith_height(P)
    if D == 0:
        return SpecializationBounds(-ha, -ha, degenerate=True, exact_height=ha)
    N = P.dimension
    log2 = log2_interval()
    logD = RealInterval.log_of(D)
    lower = -(ha + RealInterval.log_of(D + 1))
    upper = 4 * D * ha + 4 * D * logD + 8 * D * log2 + logD + RealInterval.log_of(N + 1)
    return SpecializationBounds(lower, upper)


@dataclass(frozen=True)
class GcdDecomposition:
    reduced: ProjPointQt
    common_factor: IntPolynomial
    defect: RealInterval
    defect_bound: RealInterval

    def __iter__(self):
        # unpacks as (reduced, s, defect)
        return iter((self.reduced, self.common_factor, self.defect))


def gcd_height_decomposition(raw: Sequence[IntPolynomial]) -> GcdDecomposition:
    """Split off the common factor ``s`` and measure the height defect.

    ``defect = sum_v log||raw||_v - h^arith(reduced) - h(s)``; its absolute
    value is at most ``max deg(raw_i) * log 2``.
    """
    raw = [r if isinstance(r, IntPolynomial) else IntPolynomial.constant(r) for r in raw]
    if all(r.is_zero() for r in raw):
        raise DomainError("not a projective point")
    s, reduced = primitive_tuple(raw)
    P = ProjPointQt(reduced)
    all_raw = [c for r in raw for c in r.coeffs]
    # a single log of an exact ratio, so a vanishing defect is exactly 0
    ratio = Fraction(tuple_height_int(all_raw), tuple_height_int(P.all_coeffs()) * tuple_height_int(s.coeffs))
    defect = RealInterval.log_of(ratio)
    maxdeg = max(r.degree for r in raw if not r.is_zero())
    return GcdDecomposition(P, s, defect, log2_interval() * maxdeg)
