"""Several line bundles at once: Picard actions, eigen-bundles and split products.

A Picard action is an integer matrix ``A`` with ``f^* L_i = (x) L_j^{A_ij}``.
For a real class ``L = sum x_i L_i`` this gives ``f^* L = sum (A^T x)_j L_j``,
so eigen-bundles come from eigenvectors of ``A^T``.

Spectral data is exact: the characteristic polynomial has integer
coefficients, ``rho^2`` is the largest real root of
``Res_y(p(y), y^n p(x/y))`` (whose roots are the products of pairs of
eigenvalues), and real roots are isolated with rational endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import sympy

from .canonical import (
    SweepResult,
    SweepRow,
    _pool_map,
    _t_key,
    enumerate_parameters,
    fiber_canonical_height,
    generic_canonical_height,
)
from .dynamics.family import MorphismFamily, specialize_morphism
from .exact import DomainError, IntPolynomial, RealInterval, bareiss_det
from .exact.interval import interval_sum
from .heights_q import ProjPointQ, height_of_rational, weil_height
from .heights_qt import ProjPointQt, qt_from_ints, specialize

MAX_RANK = 4
ROOT_WIDTH = Fraction(1, 10**13)
_X = sympy.Symbol("x")


@dataclass(frozen=True)
class PicAction:
    A: tuple

    def __init__(self, A: Sequence[Sequence[int]]):
        rows = tuple(tuple(int(v) for v in row) for row in A)
        if not rows or any(len(row) != len(rows) for row in rows):
            raise DomainError("Picard action must be a nonempty square matrix")
        object.__setattr__(self, "A", rows)

    @property
    def r(self) -> int:
        return len(self.A)

    def is_diagonal(self) -> bool:
        return all(self.A[i][j] == 0 for i in range(self.r) for j in range(self.r) if i != j)

    def transpose(self) -> tuple:
        return tuple(tuple(self.A[j][i] for j in range(self.r)) for i in range(self.r))


def _as_action(A) -> PicAction:
    return A if isinstance(A, PicAction) else PicAction(A)


def charpoly(A) -> IntPolynomial:
    """``det(x I - A)`` as an integer polynomial in ``x``."""
    act = _as_action(A)
    x = IntPolynomial((0, 1))
    M = [[(x if i == j else IntPolynomial()) - act.A[i][j] for j in range(act.r)] for i in range(act.r)]
    return bareiss_det(M)


def _pair_product_poly(p: IntPolynomial) -> IntPolynomial:
    """``Res_y(p(y), y^n p(x/y))``; its roots are the products ``lambda_i lambda_j``."""
    n = p.degree
    # both polynomials in y, coefficients in Z[x], highest power first
    first = [IntPolynomial.constant(p.coeff(k)) for k in range(n, -1, -1)]
    second = [IntPolynomial.monomial(n - k, p.coeff(n - k)) for k in range(n, -1, -1)]
    size = 2 * n
    rows = []
    for shift in range(n):
        rows.append([IntPolynomial()] * shift + first + [IntPolynomial()] * (n - 1 - shift))
    for shift in range(n):
        rows.append([IntPolynomial()] * shift + second + [IntPolynomial()] * (n - 1 - shift))
    assert all(len(r) == size for r in rows)
    return bareiss_det(rows)


def _sympy_poly(p: IntPolynomial) -> sympy.Poly:
    return sympy.Poly(list(reversed(p.coeffs)), _X, domain="ZZ")


def _real_roots(p: IntPolynomial) -> list[tuple[Fraction, Fraction, int]]:
    """Isolating intervals of the real roots, refined to ``ROOT_WIDTH``, with multiplicities."""
    poly = _sympy_poly(p)
    out = []
    for (a, b), mult in poly.intervals(eps=ROOT_WIDTH):
        out.append((Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q)), mult))
    return out


def _spectral_square(act: PicAction):
    p = charpoly(act)
    R = _pair_product_poly(p)
    roots = _real_roots(R)
    a, b, mult = max(roots, key=lambda r: r[1])
    return p, a, b, mult


def spectral_radius(A) -> RealInterval:
    """Certified interval for ``max |lambda|`` over the eigenvalues of ``A`` (rank at most 4)."""
    act = _as_action(A)
    if act.r > MAX_RANK:
        raise DomainError(f"unsupported rank {act.r} (at most {MAX_RANK})")
    _, a, b, _ = _spectral_square(act)
    sq = RealInterval.hull(RealInterval.exact(max(a, Fraction(0))), RealInterval.exact(max(b, Fraction(0))))
    return sq.sqrt()


@dataclass(frozen=True)
class EigenBundle:
    """``L = sum x_i L_i`` with ``f^* L = L^alpha``, i.e. ``A^T x = alpha x``."""

    alpha: RealInterval
    x: tuple
    minimal_polynomial: IntPolynomial
    hypotheses_assumed: bool

    def residual(self, A) -> list[RealInterval]:
        """Coordinates of ``A^T x - alpha x`` (each interval should contain 0)."""
        act = _as_action(A)
        At = act.transpose()
        return [
            interval_sum([At[i][j] * self.x[j] for j in range(act.r)]) - self.alpha * self.x[i]
            for i in range(act.r)
        ]


def _eval_at(p: IntPolynomial, x: RealInterval) -> RealInterval:
    acc = RealInterval.exact(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def _adjugate_column(M, col: int) -> list:
    """Column ``col`` of ``adj(M)`` for a square matrix over Z[x]."""
    n = len(M)
    out = []
    for i in range(n):
        # adj(M)[i][col] = (-1)^(i+col) det(M without row col and column i)
        minor = [[M[r][c] for c in range(n) if c != i] for r in range(n) if r != col]
        det = bareiss_det(minor) if minor else IntPolynomial.constant(1)
        det = det if isinstance(det, IntPolynomial) else IntPolynomial.constant(det)
        out.append(det if (i + col) % 2 == 0 else -det)
    return out


def _rem(p: IntPolynomial, m: sympy.Poly) -> bool:
    """Whether ``m`` divides ``p`` over Q."""
    if p.is_zero():
        return True
    return _sympy_poly(p).rem(m).is_zero


def eigen_bundle(A) -> EigenBundle:
    act = _as_action(A)
    if act.r > MAX_RANK:
        raise DomainError(f"unsupported rank {act.r} (at most {MAX_RANK})")
    p, a, b, mult = _spectral_square(act)
    rho = spectral_radius(act)
    if not rho.certainly_gt(1):
        raise DomainError(f"dominant eigenvalue modulus {rho.render(6)} is not > 1")
    if mult != 1:
        raise DomainError("dominant eigenvalue is not simple (or not real)")
    real = [(lo, hi) for lo, hi, _ in _real_roots(p)]
    # the unique eigenvalue of modulus rho is real; find it among the real roots
    lo_sq = a
    candidates = [(lo, hi) for lo, hi in real if max(lo * lo, hi * hi) >= lo_sq]
    if len(candidates) != 1:
        raise DomainError("dominant eigenvalue is not real")
    lo, hi = candidates[0]
    if hi <= 0:
        raise DomainError("dominant eigenvalue is negative")
    alpha = RealInterval.hull(RealInterval.exact(lo), RealInterval.exact(hi))
    # minimal polynomial: the irreducible factor of p vanishing at alpha
    minpoly = None
    for fac, _ in _sympy_poly(p).factor_list()[1]:
        if fac.count_roots(sympy.Rational(lo.numerator, lo.denominator), sympy.Rational(hi.numerator, hi.denominator)):
            minpoly = fac
            break
    assert minpoly is not None
    x = IntPolynomial((0, 1))
    At = act.transpose()
    M = [[(x if i == j else IntPolynomial()) - At[i][j] for j in range(act.r)] for i in range(act.r)]
    vec = None
    for col in range(act.r):
        column = _adjugate_column(M, col)
        if not all(_rem(c, minpoly) for c in column):
            vec = column
            break
    assert vec is not None, "simple eigenvalue must give a rank-one adjugate"
    coords = [None if _rem(c, minpoly) else _eval_at(c, alpha) for c in vec]
    pivot = next(i for i, c in enumerate(coords) if c is not None)
    xs = tuple(RealInterval.exact(0) if c is None else c / coords[pivot] for c in coords)
    xs = tuple(RealInterval.exact(1) if i == pivot else v for i, v in enumerate(xs))
    ip = minpoly.all_coeffs()
    mp = IntPolynomial([int(c) for c in reversed(ip)])
    return EigenBundle(alpha, xs, mp, not act.is_diagonal())


# -- heights on split products ---------------------------------------------------------


Weight = Union[int, Fraction, RealInterval]


def _weight(w: Weight) -> RealInterval:
    return w if isinstance(w, RealInterval) else RealInterval.exact(Fraction(w))


def product_height(points: Sequence[ProjPointQ], x: Sequence[Weight]) -> RealInterval:
    """``sum x_i h(P_i)`` for a point of a product of projective spaces."""
    if len(points) != len(x):
        raise DomainError("weight vector and point have different numbers of factors")
    return interval_sum([_weight(w) * weil_height(P) for w, P in zip(x, points)])


def segre_join(P: ProjPointQt, Q: ProjPointQt) -> ProjPointQt:
    """All pairwise coordinate products, normalized."""
    return qt_from_ints([a * b for a in P.coords for b in Q.coords])


def variation_exponent_bound(alpha, rho, eps) -> RealInterval:
    """``1 + eps - log(alpha) / (2 log(rho))``."""
    alpha, rho, eps = _weight(alpha), _weight(rho), _weight(eps)
    if not alpha.certainly_gt(1):
        raise DomainError("alpha must exceed 1")
    if rho.certainly_lt(alpha.lo_fraction()):
        raise DomainError("rho must be at least alpha")
    if eps.certainly_lt(0):
        raise DomainError("eps must be nonnegative")
    return 1 + eps - alpha.log() / (2 * rho.log())


@dataclass(frozen=True)
class ProductFamily:
    factors: tuple

    def __init__(self, factors: Sequence[MorphismFamily]):
        if not factors:
            raise DomainError("a product needs at least one factor")
        object.__setattr__(self, "factors", tuple(factors))

    def action(self) -> PicAction:
        r = len(self.factors)
        return PicAction([[self.factors[i].d if i == j else 0 for j in range(r)] for i in range(r)])


class _ProductTask:
    def __init__(self, F, P, x, hhats, tol):
        self.F, self.P, self.x, self.hhats, self.tol = F, P, x, hhats, tol

    def __call__(self, t):
        try:
            maps = [specialize_morphism(f, t) for f in self.F.factors]
        except DomainError:
            return t, None
        h_t = height_of_rational(t)
        fib_terms, pred_terms = [], []
        for w, ft, P, hh in zip(self.x, maps, self.P, self.hhats):
            if w.certainly_le(0) and w.certainly_ge(0):
                continue
            fib = fiber_canonical_height(ft, specialize(P, t), self.tol).value
            fib_terms.append(w * fib)
            pred_terms.append(w * hh * h_t)
        fib = interval_sum(fib_terms)
        pred = interval_sum(pred_terms)
        return t, SweepRow(t, h_t, fib, pred, fib - pred)


def product_variation_sweep(
    F: ProductFamily,
    P: Sequence[ProjPointQt],
    x: Sequence[Weight],
    H: int,
    tol=Fraction(1, 10**6),
    min_height: float = 0.0,
    workers: Optional[int] = None,
    action: Optional[PicAction] = None,
) -> SweepResult:
    """Sweep of ``sum x_i h_hat_{f_i,t}(P_i,t)`` against ``sum x_i h_hat_{f_i}(P_i) h(t)``."""
    if action is not None and not _as_action(action).is_diagonal():
        raise DomainError("unsupported: non-diagonal Picard action")
    if len(P) != len(F.factors) or len(x) != len(F.factors):
        raise DomainError("point, weights and factors must have the same length")
    xs = [_weight(w) for w in x]
    hhats = [generic_canonical_height(f, Pi, Fraction(1, 10**12)).value for f, Pi in zip(F.factors, P)]
    params = [t for t in enumerate_parameters(H) if height_of_rational(t).hi_float >= min_height]
    results = _pool_map(_ProductTask(F, list(P), xs, hhats, Fraction(tol)), params, workers)
    rows, skipped = [], []
    for t, row in results:
        (skipped if row is None else rows).append(t if row is None else row)
    rows.sort(key=SweepRow.sort_key)
    skipped.sort(key=_t_key)
    return SweepResult(rows, skipped)


def weight_label(x: Sequence[Weight]) -> str:
    parts = []
    for w in x:
        w = _weight(w)
        parts.append(str(w.lo_fraction()) if w.width().hi_fraction() == 0 else f"{w.mid():.17g}")
    return ";".join(parts)
