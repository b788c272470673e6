"""Endomorphisms of P^N over Q(t) given by homogeneous forms.

Each form is stored as a sorted tuple of ``(exponent_vector, coefficient)``
pairs with nonzero IntPolynomial coefficients.  Building a family clears
denominators, makes the grand coefficient tuple primitive and certifies
that the generic fiber is a morphism through a resultant ``a(t)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, permutations
from typing import Mapping, Optional, Sequence, Tuple

from ..exact import DomainError, IntPolynomial, RealInterval, bareiss_det, poly_gcd, rank
from ..exact.poly import ONE_POLY
from ..heights_q import ProjPointQ, Rational
from ..heights_qt import ProjPointQt, _as_fraction_pair, geom_height, primitive_tuple, specialize
from ..heights_q import tuple_height

log = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
Form = Tuple[Tuple[Exponent, IntPolynomial], ...]


def monomials(nvars: int, degree: int) -> list[Exponent]:
    """Exponent vectors of the given total degree, lexicographically descending."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return sorted(out, reverse=True)


def _add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


# -- resultant certificate ---------------------------------------------------


@dataclass(frozen=True)
class MacaulayCertificate:
    """``a(t) != 0`` at ``t0`` certifies that the fiber at ``t0`` is a morphism.

    ``matrix_size`` and ``extraneous_size`` record the Macaulay matrix used
    (Sylvester when N = 1, where the extraneous minor is empty).
    """

    resultant: IntPolynomial
    matrix_size: int
    extraneous_size: int
    method: str
    ordering: tuple = ()


def macaulay_rows(forms: Sequence[Sequence[tuple]], N: int, d: int, ordering: Sequence[int]):
    """Square Macaulay matrix in degree ``e = (N+1)(d-1)+1``.

    The row of monomial ``m`` is ``(m / x_i^d) * F_i`` for the first ``i`` in
    ``ordering`` with ``x_i^d | m``.  Returns ``(rows, monomials, extraneous)``
    where ``extraneous`` indexes the monomials divisible by two or more
    ``x_i^d``.  Entries are whatever coefficient type the forms carry.
    """
    e = (N + 1) * (d - 1) + 1
    mons = monomials(N + 1, e)
    idx = {m: k for k, m in enumerate(mons)}
    rows = []
    extraneous = []
    for k, m in enumerate(mons):
        i = next(i for i in ordering if m[i] >= d)
        mult = list(m)
        mult[i] -= d
        row = [0] * len(mons)
        for exp, c in forms[i]:
            row[idx[_add_exp(tuple(mult), exp)]] = c
        rows.append(row)
        if sum(1 for x in m if x >= d) >= 2:
            extraneous.append(k)
    return rows, mons, extraneous


def full_macaulay_rows(forms: Sequence[Sequence[tuple]], N: int, d: int):
    """All products ``m' F_i`` with ``deg m' = e - d``, in degree ``e``.

    The forms have no common projective zero exactly when these rows span
    every degree-``e`` monomial.  Returns ``(rows, labels, monomials)`` with
    ``labels[r] = (i, m')``.
    """
    e = (N + 1) * (d - 1) + 1
    mons = monomials(N + 1, e)
    idx = {m: k for k, m in enumerate(mons)}
    rows, labels = [], []
    for i, form in enumerate(forms):
        for mult in monomials(N + 1, e - d):
            row = [0] * len(mons)
            for exp, c in form:
                row[idx[_add_exp(mult, exp)]] = c
            rows.append(row)
            labels.append((i, mult))
    return rows, labels, mons


def _orderings(N: int):
    base = tuple(range(N + 1))
    yield base
    for p in permutations(base):
        if p != base:
            yield p


def _positive_lead(a: IntPolynomial) -> IntPolynomial:
    return -a if a.leading < 0 else a


def compute_certificate(forms: Sequence[Form], N: int, d: int) -> Optional[MacaulayCertificate]:
    """Resultant certificate for forms over Z[t]; ``None`` when ``a`` vanishes identically."""
    size = len(monomials(N + 1, (N + 1) * (d - 1) + 1))
    for order in _orderings(N):
        rows, mons, extr = macaulay_rows(forms, N, d, order)
        E = bareiss_det([[rows[i][j] for j in extr] for i in extr]) if extr else ONE_POLY
        E = E if isinstance(E, IntPolynomial) else IntPolynomial.constant(E)
        if E.is_zero():
            continue
        det = bareiss_det(rows)
        det = det if isinstance(det, IntPolynomial) else IntPolynomial.constant(det)
        if det.is_zero():
            return None
        a = det.divmod_exact(E)
        method = "sylvester" if N == 1 else "macaulay"
        return MacaulayCertificate(_positive_lead(a), size, len(extr), method, tuple(order))
    # every extraneous minor vanished: fall back to a gcd of maximal minors
    rows, labels, mons = full_macaulay_rows(forms, N, d)
    if rank(rows) < len(mons):
        return None
    dets = []
    for shift in range(len(rows)):
        chosen: list[int] = []
        for r in list(range(shift, len(rows))) + list(range(shift)):
            trial = chosen + [r]
            if rank([rows[i] for i in trial]) == len(trial):
                chosen = trial
                if len(chosen) == len(mons):
                    break
        det = bareiss_det([rows[i] for i in chosen])
        dets.append(det if isinstance(det, IntPolynomial) else IntPolynomial.constant(det))
        if len(dets) >= 3:
            break
    a = dets[0]
    for other in dets[1:]:
        a = poly_gcd(a, other)
    return MacaulayCertificate(_positive_lead(a), size, 0, "minor-gcd")


# -- families ------------------------------------------------------------------


@dataclass(frozen=True)
class MorphismFamily:
    N: int
    d: int
    forms: Tuple[Form, ...]
    certificate: MacaulayCertificate = field(compare=False)

    @property
    def resultant(self) -> IntPolynomial:
        return self.certificate.resultant

    def all_coeffs(self) -> list[IntPolynomial]:
        return [c for form in self.forms for _, c in form]

    def __str__(self) -> str:
        names = _var_names(self.N)
        parts = []
        for form in self.forms:
            terms = []
            for exp, c in form:
                mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(names, exp) if k)
                terms.append(f"({c})*{mono}" if mono else f"({c})")
            parts.append(" + ".join(terms) or "0")
        return "[" + " : ".join(parts) + "]"


def _var_names(N: int) -> list[str]:
    if N == 1:
        return ["x", "y"]
    if N == 2:
        return ["x", "y", "z"]
    return [f"x{i}" for i in range(N + 1)]


def _clear_denominators(raw_coeffs: list) -> list[IntPolynomial]:
    pairs = [_as_fraction_pair(c) for c in raw_coeffs]
    # lcm of the denominators in Z[t]
    L = ONE_POLY
    for _, den in pairs:
        g = poly_gcd(L, den)
        L = L * (den // g)
    return [num * (L // den) for num, den in pairs]


def build_family(N: int, d: int, raw_forms: Sequence[Mapping[Exponent, object]]) -> MorphismFamily:
    """Validate, clear denominators, make primitive and certify a family of degree-d forms."""
    if N < 1:
        raise DomainError("dimension N must be >= 1")
    if d < 2:
        raise DomainError("degree d must be >= 2")
    if len(raw_forms) != N + 1:
        raise DomainError(f"expected {N + 1} forms, got {len(raw_forms)}")
    keys, raw = [], []
    for i, form in enumerate(raw_forms):
        for exp, c in dict(form).items():
            exp = tuple(int(x) for x in exp)
            if len(exp) != N + 1 or any(x < 0 for x in exp):
                raise DomainError(f"form {i}: bad exponent vector {exp}")
            if sum(exp) != d:
                raise DomainError(f"form {i}: exponent vector {exp} does not have degree {d}")
            keys.append((i, exp))
            raw.append(c)
    coeffs = _clear_denominators(raw)
    nonzero = [c for c in coeffs if not c.is_zero()]
    if not nonzero:
        raise DomainError("not a morphism family: all forms vanish")
    _, prim = primitive_tuple(nonzero)
    it = iter(prim)
    assembled: list[dict] = [dict() for _ in range(N + 1)]
    for (i, exp), c in zip(keys, coeffs):
        if not c.is_zero():
            assembled[i][exp] = next(it)
    forms = tuple(tuple(sorted(f.items(), reverse=True)) for f in assembled)
    cert = compute_certificate(forms, N, d)
    if cert is None:
        witness = _common_zero_witness(forms, N, d) if N == 1 else ""
        raise DomainError("not a morphism family" + (f": common zero {witness}" if witness else ""))
    log.debug("family certified by %s, a(t) = %s", cert.method, cert.resultant)
    return MorphismFamily(N, d, forms, cert)


def _common_zero_witness(forms: Sequence[Form], N: int, d: int) -> str:
    """Describe a common zero of two binary forms over Q(t) (N = 1 only)."""
    import sympy

    x, t = sympy.symbols("x t")
    if all(exp[0] < d for form in forms for exp, _ in form):
        return "[1 : 0]"
    polys = []
    for form in forms:
        expr = 0
        for exp, c in form:
            expr += sum(ci * t**k for k, ci in enumerate(c.coeffs)) * x ** exp[0]
        polys.append(sympy.expand(expr))
    g = sympy.gcd(polys[0], polys[1])
    lin = [fac for fac, _ in sympy.factor_list(g, x)[1] if sympy.degree(fac, x) == 1]
    if lin:
        root = sympy.solve(lin[0], x)[0]
        return f"[{sympy.simplify(root)} : 1]"
    return f"roots of {g}"


def family_heights(f: MorphismFamily) -> tuple[int, RealInterval, RealInterval]:
    """``(h^geom(f), h^arith(f), h^total(f))`` of the primitive coefficient tuple."""
    coeffs = f.all_coeffs()
    hg = max(c.degree for c in coeffs)
    ints = [x for c in coeffs for x in c.coeffs]
    ha = tuple_height(ints) if len(ints) > 1 else RealInterval.exact(0)
    return hg, ha, ha + hg


def eval_forms(forms: Sequence[Sequence[tuple]], coords: Sequence, one) -> list:
    """Evaluate each form at ``coords`` (ints, polynomials or intervals)."""
    nv = len(coords)
    cache: dict = {}

    def power(j, k):
        key = (j, k)
        if key not in cache:
            cache[key] = one if k == 0 else power(j, k - 1) * coords[j]
        return cache[key]

    out = []
    for form in forms:
        acc = None
        for exp, c in form:
            term = c
            for j in range(nv):
                if exp[j]:
                    term = term * power(j, exp[j])
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else one * 0)
    return out


@dataclass(frozen=True)
class IterationStep:
    point: ProjPointQt
    removed_factor: IntPolynomial


def iterate_point(f: MorphismFamily, P: ProjPointQt, k: int, factor_log: Optional[list] = None) -> ProjPointQt:
    """``f^k(P)`` with primitive reduction after every step.

    When ``factor_log`` is a list, the common factor removed at each step is
    appended to it (it always divides the resultant).
    """
    if k < 0:
        raise DomainError("iteration count must be >= 0")
    if P.dimension != f.N:
        raise DomainError("point and family live in different dimensions")
    Q = P
    for _ in range(k):
        vals = eval_forms(f.forms, Q.coords, ONE_POLY)
        s, reduced = primitive_tuple(vals)
        if factor_log is not None:
            factor_log.append(s)
        Q = ProjPointQt(reduced)
    return Q


def reversed_family(f: MorphismFamily) -> MorphismFamily:
    """The family in the chart ``s = 1/t`` around ``t = infinity``.

    Coefficients are reversed at the formal degree ``h^geom(f)``.
    """
    hg = family_heights(f)[0]
    raw = [{exp: c.reverse(hg) for exp, c in form} for form in f.forms]
    return build_family(f.N, f.d, raw)


# -- specialization ------------------------------------------------------------


@dataclass(frozen=True)
class FiberMap:
    """A degree-d endomorphism of P^N over Q with integer, primitive coefficients.

    ``family`` and ``t`` record where it came from (``family`` is ``None`` for
    maps entered directly over Q).
    """

    N: int
    d: int
    forms: Tuple[Tuple[Tuple[Exponent, int], ...], ...]
    t: Optional[Fraction] = None
    at_infinity: bool = False
    family: Optional[MorphismFamily] = field(default=None, compare=False, repr=False)

    def __call__(self, Q: ProjPointQ) -> ProjPointQ:
        from ..heights_q import point_from_ints

        return point_from_ints(self.evaluate(Q.coords))

    def evaluate(self, coords: Sequence) -> list:
        return eval_forms(self.forms, coords, 1)

    def coefficients(self) -> list[int]:
        return [c for form in self.forms for _, c in form]

    def __str__(self) -> str:
        names = _var_names(self.N)
        parts = []
        for form in self.forms:
            terms = []
            for exp, c in form:
                mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(names, exp) if k)
                if not mono:
                    terms.append(str(c))
                elif abs(c) == 1:
                    terms.append(("-" if c < 0 else "") + mono)
                else:
                    terms.append(f"{c}*{mono}")
            parts.append(" + ".join(terms).replace("+ -", "- ") or "0")
        return "[" + " : ".join(parts) + "]"


def is_morphism(forms, N: int, d: int) -> bool:
    """Integer forms define a degree-d morphism iff the full Macaulay rows have full rank."""
    rows, _, mons = full_macaulay_rows(forms, N, d)
    return rank(rows) == len(mons)


def fiber_map_from_forms(N: int, d: int, raw_forms: Sequence[Mapping[Exponent, object]]) -> FiberMap:
    """A map over Q given directly (rational coefficients allowed)."""
    const = []
    for form in raw_forms:
        const.append({exp: (Fraction(c) if not isinstance(c, tuple) else c) for exp, c in dict(form).items()})
    fam = build_family(N, d, const)
    if family_heights(fam)[0] != 0:
        raise DomainError("coefficients must be rational constants")
    forms = tuple(tuple((exp, c.coeff(0)) for exp, c in form) for form in fam.forms)
    if not is_morphism(forms, N, d):
        raise DomainError("forms have a common zero: not a morphism")
    return FiberMap(N, d, forms, family=fam)


def specialize_morphism(f: MorphismFamily, t: Optional[Rational]) -> FiberMap:
    """``f_t`` with coefficients evaluated at degree ``h^geom(f)``; ``None`` is ``t = infinity``."""
    hg = family_heights(f)[0]
    if t is None:
        x0, x1 = 1, 0
    else:
        q = Fraction(t)
        x0, x1 = q.numerator, q.denominator
    raw = [[(exp, c.eval_homogeneous(x0, x1, hg)) for exp, c in form] for form in f.forms]
    flat = [c for form in raw for _, c in form if c]
    from math import gcd

    g = 0
    for c in flat:
        g = gcd(g, c)
    if g == 0:
        raise DomainError(f"bad reduction at t = {_fmt_t(t)}")
    forms = tuple(tuple((exp, c // g) for exp, c in form if c) for form in raw)
    good = _good_reduction(f, t) or is_morphism(forms, f.N, f.d)
    if not good:
        raise DomainError(f"bad reduction at t = {_fmt_t(t)}")
    return FiberMap(f.N, f.d, forms, None if t is None else Fraction(t), t is None, f)


def _fmt_t(t) -> str:
    return "inf" if t is None else str(Fraction(t))


def _good_reduction(f: MorphismFamily, t: Optional[Rational]) -> bool:
    """Resultant test; a nonzero value certifies good reduction."""
    a = f.resultant
    if t is None:
        return reversed_family(f).resultant.coeff(0) != 0
    q = Fraction(t)
    return a.eval_homogeneous(q.numerator, q.denominator, max(a.degree, 0)) != 0


def has_good_reduction(f: MorphismFamily, t: Optional[Rational]) -> bool:
    """Whether ``f_t`` is a degree-d morphism (resultant first, rank test at its roots)."""
    try:
        specialize_morphism(f, t)
    except DomainError:
        return False
    return True


def specialize_point(P: ProjPointQt, t: Optional[Rational]) -> ProjPointQ:
    return specialize(P, t)


__all__ = [
    "FiberMap",
    "MacaulayCertificate",
    "MorphismFamily",
    "build_family",
    "compute_certificate",
    "eval_forms",
    "family_heights",
    "fiber_map_from_forms",
    "full_macaulay_rows",
    "geom_height",
    "has_good_reduction",
    "is_morphism",
    "iterate_point",
    "macaulay_rows",
    "monomials",
    "reversed_family",
    "specialize_morphism",
]
