"""Cofactor certificates and exact degree tracking.

A certificate is an identity ``a * X_j^e = sum_i F_i * A_ji`` for every
variable ``X_j`` (``e = (N+1)(d-1)+1``), read off from an adjugate solve
against the transposed Macaulay matrix.  It yields one-step bounds
``|d h(Q) - h(f(Q))| <= B`` for a specific map, and shows that the common
factor removed after each step divides ``a``.

The degree tracker computes ``h^geom(f^k(P))`` for large ``k`` without
expanding the iterates: the degree drop at each step is a sum of local
valuations at the places dividing the resultant (``t = infinity``
included), and those only need ``f^k(P)`` modulo a fixed power of each place.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Optional

from sympy.polys.densearith import dup_div, dup_mul, dup_quo, dup_rem
from sympy.polys.domains import QQ, ZZ
from sympy.polys.factortools import dup_factor_list

from ..exact import DomainError, IntPolynomial, RealInterval, bareiss_det, poly_gcd_many, rank, solve_adjugate
from ..heights_qt import ProjPointQt, geom_height
from .family import (
    FiberMap,
    MorphismFamily,
    _orderings,
    compute_certificate,
    eval_forms,
    family_heights,
    full_macaulay_rows,
    macaulay_rows,
)


def _square_system(forms, N: int, d: int):
    """A nonsingular square set of Macaulay rows, plus the degree-``e`` monomials."""
    for order in _orderings(N):
        rows, mons, _ = macaulay_rows(forms, N, d, order)
        det = bareiss_det(rows)
        if det != 0:
            return rows, mons
    rows, _, mons = full_macaulay_rows(forms, N, d)
    chosen: list[int] = []
    for r in range(len(rows)):
        trial = chosen + [r]
        if rank([rows[i] for i in trial]) == len(trial):
            chosen = trial
            if len(chosen) == len(mons):
                return [rows[i] for i in chosen], mons
    raise DomainError("forms have a common zero: no cofactor certificate")


def _cofactor_solve(forms, N: int, d: int):
    rows, mons = _square_system(forms, N, d)
    e = (N + 1) * (d - 1) + 1
    n = len(mons)
    transposed = [[rows[r][c] for r in range(n)] for c in range(n)]
    targets = []
    for j in range(N + 1):
        pure = tuple(e if i == j else 0 for i in range(N + 1))
        targets.append(mons.index(pure))
    rhs = [[1 if i == col else 0 for i in range(n)] for col in targets]
    return solve_adjugate(transposed, rhs)


@dataclass(frozen=True)
class IntegerCertificate:
    """``a X_j^e = sum_i F_i A_ji`` over Z with ``S = max_j sum_i ||A_ji||_1``."""

    a: int
    S: int
    norm1: int

    def step_bound(self) -> RealInterval:
        """``max(log S, log max_i ||F_i||_1)``."""
        return RealInterval.log_of(max(self.S, self.norm1, 1))


def integer_certificate(fmap: FiberMap) -> IntegerCertificate:
    return _integer_certificate_cached(fmap.N, fmap.d, fmap.forms)


@lru_cache(maxsize=4096)
def _integer_certificate_cached(N: int, d: int, forms) -> IntegerCertificate:
    det, sols = _cofactor_solve(forms, N, d)
    g = abs(det)
    for col in sols:
        for v in col:
            g = gcd(g, v)
    a = abs(det) // g
    S = max(sum(abs(v) for v in col) // g for col in sols)
    norm1 = max(sum(abs(c) for _, c in form) for form in forms)
    return IntegerCertificate(a, S, norm1)


@dataclass(frozen=True)
class PolynomialCertificate:
    """``a(t) X_j^e = sum_i F_i A_ji`` over Z[t], reduced by the common factor.

    ``cofactor_degree`` is the largest t-degree among the ``A_ji``.
    """

    a: IntPolynomial
    cofactor_degree: int

    def step_bound(self, hg_f: int) -> int:
        """``|d h^geom(P) - h^geom(f(P))| <= max(h^geom(f), cofactor_degree)``."""
        return max(hg_f, self.cofactor_degree)


def polynomial_certificate(f: MorphismFamily) -> PolynomialCertificate:
    det, sols = _cofactor_solve(f.forms, f.N, f.d)
    det = det if isinstance(det, IntPolynomial) else IntPolynomial.constant(det)
    entries = [v if isinstance(v, IntPolynomial) else IntPolynomial.constant(v) for col in sols for v in col]
    g = poly_gcd_many([det] + [v for v in entries if not v.is_zero()])
    a = det // g
    m = max((v // g).degree for v in entries if not v.is_zero())
    return PolynomialCertificate(a, max(m, 0))


# -- degree tracking -------------------------------------------------------------


def _to_dup(p: IntPolynomial) -> list:
    return [QQ(c) for c in reversed(p.coeffs)]


class _LocalOrbit:
    """``f^k(P)`` modulo ``pi^M`` at one place, up to units.

    Valuations are insensitive to unit scaling, so after each step the
    coordinates are rescaled to primitive integer content to keep sizes small.
    """

    def __init__(self, forms, point, pi: list, M: int):
        self.forms = forms
        self.pi = pi
        self.M = M
        self.point = [self._reduce(c) for c in point]

    @staticmethod
    @lru_cache(maxsize=None)
    def _pi_power(pi: tuple, M: int) -> tuple:
        acc = [QQ(1)]
        for _ in range(M):
            acc = dup_mul(acc, list(pi), QQ)
        return tuple(acc)

    def _modulus(self) -> list:
        return list(self._pi_power(tuple(self.pi), self.M))

    def _reduce(self, g: list) -> list:
        return dup_rem(g, self._modulus(), QQ)

    def _mul(self, a, b):
        return self._reduce(dup_mul(a, b, QQ))

    def _valuation(self, g: list) -> Optional[int]:
        if not g:
            return None
        v = 0
        while True:
            q, r = dup_div(g, self.pi, QQ)
            if r:
                return v
            g, v = q, v + 1

    def step(self) -> int:
        one = _UnitDup([QQ(1)], self)
        coords = [_UnitDup(c, self) for c in self.point]
        vals = [w.poly for w in eval_forms(self.forms, coords, one)]
        vs = [self._valuation(g) for g in vals]
        finite = [v for v in vs if v is not None]
        if not finite:
            raise ArithmeticError("local precision exhausted while tracking degrees")
        v = min(finite)
        if v >= self.M:
            raise ArithmeticError("local precision exhausted while tracking degrees")
        if v:
            piv = list(self._pi_power(tuple(self.pi), v))
            vals = [dup_quo(g, piv, QQ) if g else [] for g in vals]
        self.M -= v
        self.point = _primitive([self._reduce(g) for g in vals])
        return v


class _UnitDup:
    """Thin wrapper so :func:`eval_forms` can multiply residues modulo ``pi^M``."""

    __slots__ = ("poly", "orbit")

    def __init__(self, poly, orbit):
        self.poly = poly
        self.orbit = orbit

    def __mul__(self, other):
        if isinstance(other, int):
            return _UnitDup([c * other for c in self.poly] if other else [], self.orbit)
        if isinstance(other, _UnitDup):
            return _UnitDup(self.orbit._mul(self.poly, other.poly), self.orbit)
        return _UnitDup(self.orbit._mul(self.poly, other), self.orbit)

    __rmul__ = __mul__

    def __add__(self, other):
        from sympy.polys.densearith import dup_add

        return _UnitDup(dup_add(self.poly, other.poly, QQ), self.orbit)


def _primitive(polys: list) -> list:
    nums, dens = [], []
    for g in polys:
        for c in g:
            if c:
                nums.append(int(c.numerator))
                dens.append(int(c.denominator))
    if not nums:
        return polys
    n = 0
    for x in nums:
        n = gcd(n, x)
    den = 1
    for x in dens:
        den = den * x // gcd(den, x)
    scale = QQ(den, n)
    return [[c * scale for c in g] for g in polys]


def _local_places(f: MorphismFamily, P: ProjPointQt, K: int):
    """Set up one local orbit per place where the common factor can be nontrivial."""
    hg = family_heights(f)[0]
    D0 = geom_height(P)
    places = []
    a = f.resultant
    if a.degree > 0:
        _, factors = dup_factor_list([ZZ(c) for c in reversed(a.coeffs)], ZZ)
        forms = [[(exp, _to_dup(c)) for exp, c in form] for form in f.forms]
        point = [_to_dup(c) for c in P.coords]
        for fac, mult in factors:
            pi = [QQ(int(c)) for c in fac]
            deg = len(fac) - 1
            if deg < 1:
                continue
            M = mult + 1 + K * mult
            places.append((deg, _LocalOrbit(forms, point, pi, M)))
    rev_forms = tuple(tuple((exp, c.reverse(hg)) for exp, c in form) for form in f.forms)
    cert = compute_certificate(rev_forms, f.N, f.d)
    if cert is None:
        raise DomainError("family degenerates identically in the chart at infinity")
    a_rev = cert.resultant
    v_inf = next(i for i, c in enumerate(a_rev.coeffs) if c)
    if v_inf:
        forms = [[(exp, _to_dup(c)) for exp, c in form] for form in rev_forms]
        point = [_to_dup(c.reverse(D0)) for c in P.coords]
        pi = [QQ(1), QQ(0)]
        places.append((1, _LocalOrbit(forms, point, pi, v_inf + 1 + K * v_inf)))
    return places


def degree_sequence(f: MorphismFamily, P: ProjPointQt, K: int) -> list[int]:
    """``[h^geom(f^k(P)) for k = 0..K]`` computed by local valuation tracking."""
    if P.dimension != f.N:
        raise DomainError("point and family live in different dimensions")
    hg = family_heights(f)[0]
    D = geom_height(P)
    out = [D]
    places = _local_places(f, P, K)
    for _ in range(K):
        drop = sum(deg * orbit.step() for deg, orbit in places)
        D = f.d * D + hg - drop
        out.append(D)
    return out


def exact_degree_sequence(f: MorphismFamily, P: ProjPointQt, K: int) -> list[int]:
    """Same sequence by expanding the iterates (feasible only for small ``K``)."""
    from .family import iterate_point

    out = [geom_height(P)]
    Q = P
    for _ in range(K):
        Q = iterate_point(f, Q, 1)
        out.append(geom_height(Q))
    return out


__all__ = [
    "IntegerCertificate",
    "PolynomialCertificate",
    "degree_sequence",
    "exact_degree_sequence",
    "integer_certificate",
    "polynomial_certificate",
]
