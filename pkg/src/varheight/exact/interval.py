"""Outward-rounded real intervals on top of mpmath's raw binary floats.

Every height in this package is a finite combination of logarithms of
integers, so it is carried as a :class:`RealInterval` whose endpoints are
arbitrary-precision binary floats rounded away from the exact value.
Endpoints are raw ``mpf`` tuples; all arithmetic passes an explicit
precision and rounding direction to ``mpmath.libmp``, so there is no
shared mutable float context.
"""

from __future__ import annotations

import contextlib
import contextvars
import os
from fractions import Fraction
from typing import Iterator, Union

from mpmath import libmp
from mpmath.libmp import (
    fzero,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_le,
    mpf_lt,
    mpf_mul,
    mpf_neg,
    mpf_sub,
)

DEFAULT_PRECISION = 128
MIN_PRECISION = 64

# guard bits for the transcendental kernels; the result is then widened by
# a relative 2**-prec, which dominates the kernel's error
_GUARD = 24

Number = Union[int, Fraction, "RealInterval"]


def _env_precision() -> int:
    raw = os.environ.get("HT_PRECISION_BITS")
    if not raw:
        return DEFAULT_PRECISION
    bits = int(raw)
    if bits < MIN_PRECISION:
        raise ValueError(f"HT_PRECISION_BITS must be >= {MIN_PRECISION}, got {bits}")
    return bits


_precision: contextvars.ContextVar[int] = contextvars.ContextVar(
    "varheight_precision", default=_env_precision()
)


def working_precision() -> int:
    return _precision.get()


def set_working_precision(bits: int) -> None:
    if bits < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION} bits")
    _precision.set(bits)


@contextlib.contextmanager
def precision(bits: int) -> Iterator[None]:
    """Temporarily change the working precision (in bits)."""
    if bits < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION} bits")
    token = _precision.set(bits)
    try:
        yield
    finally:
        _precision.reset(token)


def _from_fraction(q: Fraction, prec: int, rnd: str):
    return libmp.from_rational(q.numerator, q.denominator, prec, rnd)


def _widen(v, prec: int, direction: int):
    """Move ``v`` outward by a relative 2**-(prec - 2)."""
    if v == fzero:
        return v
    mag = libmp.mpf_shift(libmp.mpf_abs(v), -(prec - 2))
    if direction < 0:
        return mpf_sub(v, mag, prec, "f")
    return mpf_add(v, mag, prec, "c")


def _log_down(x, prec: int):
    if x == libmp.fone:
        return fzero
    return _widen(libmp.mpf_log(x, prec + _GUARD, "f"), prec, -1)


def _log_up(x, prec: int):
    if x == libmp.fone:
        return fzero
    return _widen(libmp.mpf_log(x, prec + _GUARD, "c"), prec, +1)


class RealInterval:
    """A closed interval ``[lo, hi]`` of reals with binary-float endpoints."""

    __slots__ = ("_lo", "_hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        if mpf_lt(hi, lo):
            raise ValueError("interval with lo > hi")
        object.__setattr__(self, "_lo", lo)
        object.__setattr__(self, "_hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("RealInterval is immutable")

    def __reduce__(self):
        return (RealInterval, (self._lo, self._hi))

    # -- construction -------------------------------------------------
    @classmethod
    def exact(cls, value: Union[int, Fraction]) -> "RealInterval":
        """Tightest interval around an integer or rational."""
        prec = working_precision()
        if isinstance(value, int):
            if value.bit_length() <= prec:
                v = libmp.from_int(value)
                return cls(v, v)
            return cls(libmp.from_int(value, prec, "f"), libmp.from_int(value, prec, "c"))
        q = Fraction(value)
        if q.denominator == 1:
            return cls.exact(q.numerator)
        return cls(_from_fraction(q, prec, "f"), _from_fraction(q, prec, "c"))

    @classmethod
    def hull(cls, a: "RealInterval", b: "RealInterval") -> "RealInterval":
        lo = a._lo if mpf_le(a._lo, b._lo) else b._lo
        hi = a._hi if mpf_le(b._hi, a._hi) else b._hi
        return cls(lo, hi)

    @classmethod
    def log_of(cls, value: Union[int, Fraction]) -> "RealInterval":
        """Enclosure of ``log(value)`` for a positive integer or rational."""
        q = Fraction(value)
        if q <= 0:
            raise ValueError("log of a non-positive number")
        if q == 1:
            return ZERO
        return cls.exact(q).log()

    # -- accessors ----------------------------------------------------
    @property
    def lo(self):
        return self._lo

    @property
    def hi(self):
        return self._hi

    @property
    def lo_float(self) -> float:
        return libmp.to_float(self._lo, rnd="f")

    @property
    def hi_float(self) -> float:
        return libmp.to_float(self._hi, rnd="c")

    def width(self) -> "RealInterval":
        prec = working_precision()
        return RealInterval(mpf_sub(self._hi, self._lo, prec, "f"), mpf_sub(self._hi, self._lo, prec, "c"))

    def width_float(self) -> float:
        return libmp.to_float(mpf_sub(self._hi, self._lo, working_precision(), "c"), rnd="c")

    def mid(self) -> float:
        m = libmp.mpf_shift(mpf_add(self._lo, self._hi, working_precision() + 2), -1)
        return libmp.to_float(m)

    def mid_mpf(self):
        return libmp.mpf_shift(mpf_add(self._lo, self._hi, working_precision() + 2), -1)

    def lo_fraction(self) -> Fraction:
        return _to_fraction(self._lo)

    def hi_fraction(self) -> Fraction:
        return _to_fraction(self._hi)

    # -- predicates ---------------------------------------------------
    def contains(self, x: Union[int, Fraction, float, "RealInterval"]) -> bool:
        if isinstance(x, RealInterval):
            return mpf_le(self._lo, x._lo) and mpf_le(x._hi, self._hi)
        if isinstance(x, float):
            v = libmp.from_float(x)
            return mpf_le(self._lo, v) and mpf_le(v, self._hi)
        q = Fraction(x)
        return self.lo_fraction() <= q <= self.hi_fraction()

    def contains_zero(self) -> bool:
        return mpf_le(self._lo, fzero) and mpf_le(fzero, self._hi)

    def overlaps(self, other: "RealInterval") -> bool:
        return mpf_le(self._lo, other._hi) and mpf_le(other._lo, self._hi)

    def certainly_lt(self, other: Number) -> bool:
        o = _coerce(other)
        return mpf_lt(self._hi, o._lo)

    def certainly_le(self, other: Number) -> bool:
        o = _coerce(other)
        return mpf_le(self._hi, o._lo)

    def certainly_gt(self, other: Number) -> bool:
        return _coerce(other).certainly_lt(self)

    def certainly_ge(self, other: Number) -> bool:
        return _coerce(other).certainly_le(self)

    def is_positive(self) -> bool:
        return mpf_lt(fzero, self._lo)

    # -- arithmetic ---------------------------------------------------
    def __neg__(self) -> "RealInterval":
        return RealInterval(mpf_neg(self._hi), mpf_neg(self._lo))

    def __add__(self, other: Number) -> "RealInterval":
        o = _coerce(other)
        prec = working_precision()
        return RealInterval(mpf_add(self._lo, o._lo, prec, "f"), mpf_add(self._hi, o._hi, prec, "c"))

    __radd__ = __add__

    def __sub__(self, other: Number) -> "RealInterval":
        o = _coerce(other)
        prec = working_precision()
        return RealInterval(mpf_sub(self._lo, o._hi, prec, "f"), mpf_sub(self._hi, o._lo, prec, "c"))

    def __rsub__(self, other: Number) -> "RealInterval":
        return _coerce(other) - self

    def __mul__(self, other: Number) -> "RealInterval":
        o = _coerce(other)
        prec = working_precision()
        ends = ((self._lo, o._lo), (self._lo, o._hi), (self._hi, o._lo), (self._hi, o._hi))
        los = [mpf_mul(a, b, prec, "f") for a, b in ends]
        his = [mpf_mul(a, b, prec, "c") for a, b in ends]
        return RealInterval(_min(los), _max(his))

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "RealInterval":
        o = _coerce(other)
        if o.contains_zero():
            raise ZeroDivisionError("interval division by an interval containing 0")
        prec = working_precision()
        ends = ((self._lo, o._lo), (self._lo, o._hi), (self._hi, o._lo), (self._hi, o._hi))
        los = [mpf_div(a, b, prec, "f") for a, b in ends]
        his = [mpf_div(a, b, prec, "c") for a, b in ends]
        return RealInterval(_min(los), _max(his))

    def __rtruediv__(self, other: Number) -> "RealInterval":
        return _coerce(other) / self

    def __pow__(self, n: int) -> "RealInterval":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        if n == 0:
            return ONE
        if n % 2 == 1 or not self.contains_zero():
            prec = working_precision()
            a = libmp.mpf_pow_int(self._lo, n, prec, "f")
            b = libmp.mpf_pow_int(self._hi, n, prec, "f")
            c = libmp.mpf_pow_int(self._lo, n, prec, "c")
            d = libmp.mpf_pow_int(self._hi, n, prec, "c")
            return RealInterval(_min([a, b]), _max([c, d]))
        m = self.abs()
        return RealInterval(fzero, (m ** n)._hi)

    def abs(self) -> "RealInterval":
        if mpf_le(fzero, self._lo):
            return self
        if mpf_le(self._hi, fzero):
            return -self
        return RealInterval(fzero, _max([mpf_neg(self._lo), self._hi]))

    def log(self) -> "RealInterval":
        if not self.is_positive():
            raise ValueError("log of an interval that is not strictly positive")
        prec = working_precision()
        return RealInterval(_log_down(self._lo, prec), _log_up(self._hi, prec))

    def sqrt(self) -> "RealInterval":
        if mpf_lt(self._lo, fzero):
            raise ValueError("sqrt of an interval with negative part")
        prec = working_precision()
        lo = _widen(libmp.mpf_sqrt(self._lo, prec + _GUARD, "f"), prec, -1)
        hi = _widen(libmp.mpf_sqrt(self._hi, prec + _GUARD, "c"), prec, +1)
        if mpf_lt(lo, fzero):
            lo = fzero
        return RealInterval(lo, hi)

    def log_plus(self) -> "RealInterval":
        """``log max(1, x)``."""
        return max_interval(self, ONE).log()

    def clamp_nonnegative(self) -> "RealInterval":
        if mpf_lt(self._lo, fzero):
            if mpf_lt(self._hi, fzero):
                raise ValueError("interval is entirely negative")
            return RealInterval(fzero, self._hi)
        return self

    # -- rendering ----------------------------------------------------
    def render(self, digits: int = 17) -> str:
        return f"[{fmt_endpoint(self._lo, digits, 'f')}, {fmt_endpoint(self._hi, digits, 'c')}]"

    def __repr__(self) -> str:
        return f"RealInterval{self.render()}"

    def __eq__(self, other) -> bool:
        if not isinstance(other, RealInterval):
            return NotImplemented
        return mpf_cmp(self._lo, other._lo) == 0 and mpf_cmp(self._hi, other._hi) == 0

    def __hash__(self) -> int:
        return hash((self._lo, self._hi))


def _coerce(x: Number) -> RealInterval:
    if isinstance(x, RealInterval):
        return x
    if isinstance(x, (int, Fraction)):
        return RealInterval.exact(x)
    raise TypeError(f"cannot use {type(x).__name__} in interval arithmetic")


def _min(vals):
    out = vals[0]
    for v in vals[1:]:
        if mpf_lt(v, out):
            out = v
    return out


def _max(vals):
    out = vals[0]
    for v in vals[1:]:
        if mpf_lt(out, v):
            out = v
    return out


def _to_fraction(v) -> Fraction:
    sign, man, exp, _ = v
    if v == fzero:
        return Fraction(0)
    q = Fraction(int(man)) * (Fraction(2) ** exp)
    return -q if sign else q


def fmt_endpoint(v, digits: int, rnd: str) -> str:
    """Decimal rendering of an endpoint, rounded in direction ``rnd``."""
    if v == fzero:
        return "0"
    # to_str rounds to nearest; nudge outward by one unit in the last digit
    s = libmp.to_str(v, digits)
    back = libmp.from_str(s, working_precision() + 16, "n")
    if rnd == "f" and mpf_lt(v, back):
        s = libmp.to_str(_nudge(v, digits, -1), digits)
    elif rnd == "c" and mpf_lt(back, v):
        s = libmp.to_str(_nudge(v, digits, +1), digits)
    return s


def _nudge(v, digits: int, direction: int):
    prec = working_precision() + 16
    # one decimal ulp at `digits` significant digits, relative to |v|
    rel = libmp.from_rational(1, 10 ** (digits - 1), prec, "c")
    step = mpf_mul(libmp.mpf_abs(v), rel, prec, "c")
    return mpf_add(v, step if direction > 0 else mpf_neg(step), prec, "c" if direction > 0 else "f")


def max_interval(*xs: RealInterval) -> RealInterval:
    xs = [_coerce(x) for x in xs]
    return RealInterval(_max([x._lo for x in xs]), _max([x._hi for x in xs]))


def min_interval(*xs: RealInterval) -> RealInterval:
    xs = [_coerce(x) for x in xs]
    return RealInterval(_min([x._lo for x in xs]), _min([x._hi for x in xs]))


def interval_sum(xs) -> RealInterval:
    total = ZERO
    for x in xs:
        total = total + x
    return total


ZERO = RealInterval(fzero, fzero)
ONE = RealInterval(libmp.fone, libmp.fone)


def log2_interval() -> RealInterval:
    return RealInterval.log_of(2)
