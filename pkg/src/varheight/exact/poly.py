"""Dense univariate polynomials with integer coefficients.

Coefficients are stored lowest degree first.  Large products go through
Kronecker substitution so that Python's big-integer multiplication does
the heavy lifting.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Tuple, Union

from sympy.polys.domains import ZZ
from sympy.polys.euclidtools import dup_gcd

from .errors import DomainError

# below this many coefficient pairs schoolbook multiplication is faster
_KRONECKER_CUTOFF = 64


def _strip(coeffs: Sequence[int]) -> Tuple[int, ...]:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(int(c) for c in coeffs[:n])


class IntPolynomial:
    """An element of Z[t].  Immutable; the zero polynomial has ``degree == -1``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        object.__setattr__(self, "coeffs", _strip(list(coeffs)))

    def __setattr__(self, name, value):
        raise AttributeError("IntPolynomial is immutable")

    def __reduce__(self):
        return (IntPolynomial, (self.coeffs,))

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, c: int) -> "IntPolynomial":
        return cls((c,))

    @classmethod
    def monomial(cls, deg: int, c: int = 1) -> "IntPolynomial":
        return cls([0] * deg + [c])

    @classmethod
    def from_strings(cls, items: Sequence[str]) -> "IntPolynomial":
        return cls(int(s) for s in items)

    # -- basic properties --------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def nonzero_coeffs(self) -> list[int]:
        return [c for c in self.coeffs if c]

    def content(self) -> int:
        if not self.coeffs:
            raise DomainError("content of the zero polynomial")
        return reduce(math.gcd, self.coeffs)

    def to_strings(self) -> list[str]:
        return [str(c) for c in self.coeffs] or ["0"]

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other: "PolyLike") -> "IntPolynomial":
        o = as_poly(other)
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPolynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(-c for c in self.coeffs)

    def __sub__(self, other: "PolyLike") -> "IntPolynomial":
        return self + (-as_poly(other))

    def __rsub__(self, other: "PolyLike") -> "IntPolynomial":
        return as_poly(other) - self

    def __mul__(self, other: "PolyLike") -> "IntPolynomial":
        if isinstance(other, int):
            if other == 0:
                return ZERO_POLY
            return IntPolynomial(c * other for c in self.coeffs)
        return IntPolynomial(_mul(self.coeffs, as_poly(other).coeffs))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "IntPolynomial":
        if n < 0:
            raise ValueError("negative power")
        result = ONE_POLY
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale_exact(self, c: int) -> "IntPolynomial":
        """Divide every coefficient by ``c``; raises if not exact."""
        out = []
        for a in self.coeffs:
            q, r = divmod(a, c)
            if r:
                raise ArithmeticError(f"{c} does not divide {self}")
            out.append(q)
        return IntPolynomial(out)

    def divmod_exact(self, other: "IntPolynomial") -> "IntPolynomial":
        """Exact quotient in Z[t]; raises ArithmeticError if ``other`` does not divide."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return ZERO_POLY
        rem = list(self.coeffs)
        dq = other.degree
        lc = other.leading
        q = [0] * (len(rem) - dq) if len(rem) > dq else []
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i]
            if c == 0:
                continue
            quo, r = divmod(c, lc)
            if r:
                raise ArithmeticError("inexact polynomial division")
            q[i - dq] = quo
            for j, b in enumerate(other.coeffs):
                rem[i - dq + j] -= quo * b
        if any(rem):
            raise ArithmeticError("inexact polynomial division")
        return IntPolynomial(q)

    def __floordiv__(self, other: "PolyLike") -> "IntPolynomial":
        if isinstance(other, int):
            return self.scale_exact(other)
        return self.divmod_exact(as_poly(other))

    def divides(self, other: "IntPolynomial") -> bool:
        try:
            other.divmod_exact(self)
        except ArithmeticError:
            return False
        return True

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(i * c for i, c in enumerate(self.coeffs) if i)

    # -- evaluation ---------------------------------------------------
    def __call__(self, x: Union[int, Fraction]) -> Union[int, Fraction]:
        acc: Union[int, Fraction] = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_homogeneous(self, x0: int, x1: int, degree: int) -> int:
        """Value of the degree-``degree`` homogenization at ``[x0 : x1]``.

        The form is ``sum c_j x0**j x1**(degree - j)``, so ``[t : 1]`` gives the
        usual value and ``[1 : 0]`` picks out the coefficient of ``t**degree``.
        """
        if self.degree > degree:
            raise ValueError("formal degree below actual degree")
        total = 0
        p0 = 1
        pows1 = [1]
        for _ in range(degree):
            pows1.append(pows1[-1] * x1)
        for j, c in enumerate(self.coeffs):
            if c:
                total += c * p0 * pows1[degree - j]
            p0 *= x0
        return total

    def reverse(self, degree: int) -> "IntPolynomial":
        """``t**degree * self(1/t)``: the chart at infinity."""
        if self.degree > degree:
            raise ValueError("formal degree below actual degree")
        padded = list(self.coeffs) + [0] * (degree + 1 - len(self.coeffs))
        return IntPolynomial(reversed(padded))

    def sup_norm_inf(self) -> int:
        return max((abs(c) for c in self.coeffs), default=0)

    def l1_norm(self) -> int:
        return sum(abs(c) for c in self.coeffs)

    # -- dunder -------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.coeffs == _strip([other])
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __repr__(self) -> str:
        return f"IntPolynomial({list(self.coeffs)})"

    def __str__(self) -> str:
        return poly_to_str(self)


PolyLike = Union[IntPolynomial, int]

ZERO_POLY = IntPolynomial()
ONE_POLY = IntPolynomial((1,))
T = IntPolynomial((0, 1))


def as_poly(x: PolyLike) -> IntPolynomial:
    if isinstance(x, IntPolynomial):
        return x
    if isinstance(x, int):
        return IntPolynomial((x,))
    raise TypeError(f"not an integer polynomial: {x!r}")


def poly_to_str(f: IntPolynomial, var: str = "t") -> str:
    if f.is_zero():
        return "0"
    parts = []
    for i in range(f.degree, -1, -1):
        c = f.coeffs[i]
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if i == 0:
            body = str(a)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if a == 1 else f"{a}*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _schoolbook(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _kronecker(a: Sequence[int], b: Sequence[int]) -> list[int]:
    n = min(len(a), len(b))
    bound = max(abs(c) for c in a) * max(abs(c) for c in b) * n
    shift = bound.bit_length() + 2
    mask = (1 << shift) - 1
    half = 1 << (shift - 1)

    def pack(cs):
        acc = 0
        for c in reversed(cs):
            acc = (acc << shift) + c
        return acc

    prod = pack(a) * pack(b)
    out = []
    for _ in range(len(a) + len(b) - 1):
        chunk = prod & mask
        if chunk >= half:
            chunk -= 1 << shift
        out.append(chunk)
        prod = (prod - chunk) >> shift
    return out


def _mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    if len(a) * len(b) <= _KRONECKER_CUTOFF * 8 or min(len(a), len(b)) < 4:
        return _schoolbook(a, b)
    return _kronecker(a, b)


def content_and_primitive(f: IntPolynomial) -> tuple[int, IntPolynomial]:
    """Split ``f`` into positive content and primitive part.

    The primitive part keeps the sign of ``f``'s leading coefficient.
    """
    if f.is_zero():
        raise DomainError("content of the zero polynomial")
    c = f.content()
    c = abs(c)
    return c, f.scale_exact(c)


def poly_gcd(f: IntPolynomial, g: IntPolynomial) -> IntPolynomial:
    """GCD in Z[t], normalized to a positive leading coefficient."""
    if f.is_zero() and g.is_zero():
        raise DomainError("gcd of two zero polynomials")
    if f.is_zero():
        return _positive(g)
    if g.is_zero():
        return _positive(f)
    if f.is_constant() or g.is_constant():
        return IntPolynomial.constant(math.gcd(f.content(), g.content()))
    hi_f = [ZZ(c) for c in reversed(f.coeffs)]
    hi_g = [ZZ(c) for c in reversed(g.coeffs)]
    h = dup_gcd(hi_f, hi_g, ZZ)
    return _positive(IntPolynomial(int(c) for c in reversed(h)))


def poly_gcd_many(polys: Iterable[IntPolynomial]) -> IntPolynomial:
    acc = ZERO_POLY
    for p in polys:
        if p.is_zero():
            continue
        acc = p if acc.is_zero() else poly_gcd(acc, p)
        if acc.is_constant() and abs(acc.leading) == 1:
            return ONE_POLY
    if acc.is_zero():
        raise DomainError("gcd of an all-zero tuple")
    return _positive(acc)


def _positive(f: IntPolynomial) -> IntPolynomial:
    return -f if f.leading < 0 else f


def frac_poly_to_int(coeffs: Sequence[Fraction]) -> tuple[int, IntPolynomial]:
    """Clear denominators: returns ``(D, F)`` with ``D * coeffs == F``."""
    den = 1
    for c in coeffs:
        den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
    return den, IntPolynomial(int(Fraction(c) * den) for c in coeffs)
