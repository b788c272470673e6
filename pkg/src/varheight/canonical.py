"""Certified canonical heights, preperiodicity and the variation experiment.

Every canonical height is produced by telescoping: from a one-step bound
``|d h(Q) - h(f(Q))| <= B`` we get ``|h_hat(Q) - d^-k h(f^k Q)| <= B / ((d-1) d^k)``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional

import numpy as np

from .dynamics.certify import degree_sequence, integer_certificate, polynomial_certificate
from .dynamics.constants import constants_bundle, corollary_constants, fiber_constants
from .dynamics.family import (
    FiberMap,
    MorphismFamily,
    build_family,
    family_heights,
    specialize_morphism,
)
from .exact import DomainError, RealInterval, max_interval, precision, working_precision
from .exact.interval import ONE
from .heights_q import ProjPointQ, height_of_rational
from .heights_qt import ProjPointQt, geom_height, specialize, total_height

EXACT_BITS = 256  # switch from exact integers to intervals above this size


@dataclass(frozen=True)
class CanonicalHeightResult:
    value: RealInterval
    k: int
    bound: RealInterval
    provenance: str
    bound_source: str = "certificate"

    def render(self, digits: int = 17) -> str:
        return self.value.render(digits)


def _check_tol(tol) -> Fraction:
    tol = Fraction(tol)
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    return tol


def _min_iterations(B_hi: Fraction, d: int, tol: Fraction) -> int:
    """Smallest ``k`` with ``2 B / ((d-1) d^k) <= tol``."""
    k = 0
    while 2 * B_hi > tol * (d - 1) * d**k:
        k += 1
    return k


# -- fibers -------------------------------------------------------------------------


def _as_family(fmap: FiberMap) -> MorphismFamily:
    if fmap.family is not None:
        return fmap.family
    return build_family(fmap.N, fmap.d, [dict(form) for form in fmap.forms])


def closed_form_fiber_bound(fmap: FiberMap) -> RealInterval:
    """``C1 h(t) + C2`` of the family the map came from (constant family for maps over Q)."""
    fam = _as_family(fmap)
    C1, C2, _ = fiber_constants(fam)
    # maps over Q and the fiber at infinity both sit at a parameter of height 0
    ht = RealInterval.exact(0) if fmap.t is None else height_of_rational(fmap.t)
    return C1 * ht + C2


def fiber_step_bound(fmap: FiberMap, per_map: bool = True) -> tuple[RealInterval, str]:
    """One-step bound ``B`` and where it came from, taking the smaller available value."""
    closed = (fmap.d - 1) * closed_form_fiber_bound(fmap)
    if not per_map:
        return closed, "closed-form"
    cert = integer_certificate(fmap).step_bound()
    if cert.hi_fraction() <= closed.hi_fraction():
        return cert, "certificate"
    return closed, "closed-form"


def _max_log_abs(coords) -> RealInterval:
    mags = [c.abs() for c in coords]
    m = max_interval(*mags)
    return m.log()


def _fiber_orbit_height(fmap: FiberMap, Q: ProjPointQ, K: int, bits: int):
    """``h(f^K Q)`` as an interval, or ``0`` with the step count if the orbit cycles first."""
    cert = integer_certificate(fmap)
    R = cert.a
    coords = list(Q.coords)
    seen = {tuple(coords): 0}
    k = 0
    while k < K and max(abs(c) for c in coords).bit_length() <= EXACT_BITS:
        vals = fmap.evaluate(coords)
        g = 0
        for v in vals:
            g = math.gcd(g, v)
        coords = [v // g for v in vals]
        k += 1
        key = tuple(coords) if coords[next(i for i, c in enumerate(coords) if c)] > 0 else tuple(-c for c in coords)
        if key in seen:
            return None, k
        seen[key] = k
    if k == K:
        return RealInterval.log_of(max(abs(c) for c in coords)), k
    with precision(bits):
        modulus = R ** (K - k + 1) if R > 1 else 1
        res = [c % modulus for c in coords] if R > 1 else None
        ivs = [RealInterval.exact(c) for c in coords]
        one = ONE
        while k < K:
            vals = _eval_interval(fmap, ivs, one)
            if R > 1:
                rvals = [v % modulus for v in fmap.evaluate(res)]
                g = R
                for v in rvals:
                    g = math.gcd(g, v)
                modulus //= R
                res = [(v // g) % modulus for v in rvals]
                ivs = [v / g for v in vals] if g > 1 else vals
            else:
                ivs = vals
            k += 1
        return _max_log_abs(ivs), k


def _eval_interval(fmap: FiberMap, coords, one):
    from .dynamics.family import eval_forms

    return eval_forms(fmap.forms, coords, one)


def fiber_canonical_height(fmap: FiberMap, Q: ProjPointQ, tol=Fraction(1, 10**6), per_map: bool = True) -> CanonicalHeightResult:
    """Certified ``h_hat_{f_t}(Q)`` with interval width at most ``tol``."""
    tol = _check_tol(tol)
    if Q.dimension != fmap.N:
        raise DomainError("point and map live in different dimensions")
    d = fmap.d
    B, source = fiber_step_bound(fmap, per_map)
    B_hi = B.hi_fraction()
    K = _min_iterations(B_hi, d, tol * Fraction(999, 1000))
    base = max(working_precision(), 64)
    while True:
        bits = base + K * (d.bit_length() + 1) + 32
        for _ in range(6):
            try:
                h, k = _fiber_orbit_height(fmap, Q, K, bits)
                break
            except (ValueError, ZeroDivisionError):
                bits *= 2
        else:
            raise ArithmeticError("interval iteration failed to stabilize")
        if h is None:
            # the orbit repeated a point: preperiodic, so the canonical height is 0
            return CanonicalHeightResult(RealInterval.exact(0), k, B, "fiber", source)
        with precision(bits):
            scale = Fraction(1, d**K)
            err = B * Fraction(1, (d - 1) * d**K)
            mid = h * scale
            value = RealInterval.hull(mid - err, mid + err).clamp_nonnegative()
        if value.width().hi_fraction() <= tol:
            return CanonicalHeightResult(value, K, B, "fiber", source)
        K += 1


# -- generic fiber ------------------------------------------------------------------


def generic_step_bound(f: MorphismFamily, per_map: bool = True) -> tuple[int, str]:
    hg = family_heights(f)[0]
    closed = constants_bundle(f).C3 * hg
    if not per_map:
        return closed, "closed-form"
    cert = polynomial_certificate(f).step_bound(hg)
    return (cert, "certificate") if cert <= closed else (closed, "closed-form")


def generic_canonical_height(
    f: MorphismFamily,
    P: ProjPointQt,
    tol=Fraction(1, 10**9),
    max_iter: int = 64,
    per_map: bool = True,
) -> CanonicalHeightResult:
    """``h_hat_f(P)`` on the generic fiber from exact geometric heights of iterates."""
    tol = _check_tol(tol)
    d = f.d
    B, source = generic_step_bound(f, per_map)
    K = _min_iterations(Fraction(B), d, tol)
    if K > max_iter:
        raise DomainError(f"iteration cap {max_iter} exceeded (need {K}); raise max_iter")
    D = degree_sequence(f, P, K)[-1] if K else geom_height(P)
    mid = Fraction(D, d**K)
    err = Fraction(B, (d - 1) * d**K)
    lo = max(mid - err, Fraction(0))
    value = RealInterval.hull(RealInterval.exact(lo), RealInterval.exact(mid + err))
    return CanonicalHeightResult(value, K, RealInterval.exact(B), "generic", source)


# -- preperiodicity -----------------------------------------------------------------


@dataclass(frozen=True)
class PreperiodicCertificate:
    """Outcome of an orbit walk.

    ``preperiodic`` with ``cycle_start``/``cycle_length`` (``Q_{start} = Q_{start+length}``),
    or not preperiodic with ``escape_index`` where the height passed ``threshold``.
    """

    preperiodic: bool
    steps: int
    threshold: RealInterval
    cycle_start: Optional[int] = None
    cycle_length: Optional[int] = None
    escape_index: Optional[int] = None
    orbit: tuple = ()

    def __bool__(self) -> bool:
        return self.preperiodic


def escape_threshold(fmap: FiberMap, per_map: bool = False) -> RealInterval:
    """Height above which a point cannot be preperiodic."""
    closed = closed_form_fiber_bound(fmap)
    if not per_map:
        return closed
    cert = integer_certificate(fmap).step_bound() / (fmap.d - 1)
    return cert if cert.hi_fraction() <= closed.hi_fraction() else closed


def is_preperiodic(fmap: FiberMap, Q: ProjPointQ, per_map: bool = False, threshold: Optional[RealInterval] = None) -> PreperiodicCertificate:
    if Q.dimension != fmap.N:
        raise DomainError("point and map live in different dimensions")
    thr = threshold if threshold is not None else escape_threshold(fmap, per_map)
    seen: dict = {}
    orbit = []
    cur = Q
    k = 0
    while True:
        if cur.coords in seen:
            start = seen[cur.coords]
            return PreperiodicCertificate(True, k, thr, start, k - start, orbit=tuple(orbit))
        seen[cur.coords] = k
        orbit.append(cur)
        if RealInterval.log_of(cur.max_abs()).certainly_gt(thr):
            return PreperiodicCertificate(False, k, thr, escape_index=k, orbit=tuple(orbit))
        cur = fmap(cur)
        k += 1


def enumerate_parameters(H: int, include_infinity: bool = True) -> Iterator[Optional[Fraction]]:
    """All ``p/q`` with ``gcd(p, q) = 1``, ``q >= 1`` and ``max(|p|, q) <= H``, then infinity."""
    if H < 1:
        raise DomainError("enumeration cap must be >= 1")
    for q in range(1, H + 1):
        for p in range(-H, H + 1):
            if math.gcd(p, q) == 1:
                yield Fraction(p, q)
    if include_infinity:
        yield None


def _t_key(t: Optional[Fraction]):
    return (1, 0) if t is None else (t.numerator, t.denominator)


class _AtPrecision:
    """Run a task at the caller's working precision inside a worker process."""

    def __init__(self, fn, bits: int):
        self.fn, self.bits = fn, bits

    def __call__(self, item):
        with precision(self.bits):
            return self.fn(item)


def _pool_map(fn, items: list, workers: Optional[int], chunksize: int = 64) -> list:
    workers = workers or os.cpu_count() or 1
    if workers <= 1 or len(items) < 2 * chunksize:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_AtPrecision(fn, working_precision()), items, chunksize=chunksize))


@dataclass(frozen=True)
class SearchResult:
    preperiodic: list
    undecided: list
    cap: int
    hhat: RealInterval
    bound: RealInterval

    def parameters(self) -> list:
        return [t for t, _ in self.preperiodic]


class _SearchTask:
    def __init__(self, f, P, per_map):
        self.f, self.P, self.per_map = f, P, per_map

    def __call__(self, t):
        try:
            ft = specialize_morphism(self.f, t)
        except DomainError:
            return t, None
        return t, is_preperiodic(ft, specialize(self.P, t), per_map=self.per_map)


def preperiodic_parameter_search(
    f: MorphismFamily,
    P: ProjPointQt,
    H: int,
    per_map: bool = False,
    workers: Optional[int] = None,
) -> SearchResult:
    """Every parameter of height at most ``log H`` (plus infinity) where ``P_t`` is preperiodic."""
    hhat = generic_canonical_height(f, P, Fraction(1, 10**9)).value
    if not hhat.certainly_gt(0):
        raise DomainError("generic height not certified positive")
    params = list(enumerate_parameters(H))
    results = _pool_map(_SearchTask(f, P, per_map), params, workers)
    found, undecided = [], []
    for t, cert in sorted(results, key=lambda r: _t_key(r[0])):
        if cert is None:
            undecided.append(t)
        elif cert.preperiodic:
            found.append((t, cert))
    return SearchResult(found, undecided, H, hhat, corollary_bound(f, P, hhat))


def corollary_bound(f: MorphismFamily, P: ProjPointQt, hhat: Optional[RealInterval] = None) -> RealInterval:
    """``C max{(h_tot(P) + h_tot(f) + 1)^4 / h_hat^2, h_tot(f) + 1}`` with the lower endpoint of ``h_hat``."""
    if hhat is None:
        hhat = generic_canonical_height(f, P, Fraction(1, 10**9)).value
    if not hhat.certainly_gt(0):
        raise DomainError("generic height not certified positive")
    _, _, _, C = corollary_constants(f.N, f.d)
    htf = family_heights(f)[2]
    num = (total_height(P) + htf + 1) ** 4
    lo = RealInterval.exact(hhat.lo_fraction())
    return C * max_interval(num / (lo * lo), htf + 1)


# -- the variation experiment ---------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    t: Optional[Fraction]
    h_t: RealInterval
    hhat: RealInterval
    prediction: RealInterval
    error: RealInterval

    @property
    def t_num(self) -> int:
        return 1 if self.t is None else self.t.numerator

    @property
    def t_den(self) -> int:
        return 0 if self.t is None else self.t.denominator

    def sort_key(self):
        return (self.h_t.mid(), self.t_num, self.t_den)


CSV_COLUMNS = ["t_num", "t_den", "h_t_lo", "h_t_hi", "hhat_lo", "hhat_hi", "pred_lo", "pred_hi", "err_lo", "err_hi"]


def row_fields(row: SweepRow, digits: int = 17) -> list[str]:
    from .exact.interval import fmt_endpoint

    out = [str(row.t_num), str(row.t_den)]
    for iv in (row.h_t, row.hhat, row.prediction, row.error):
        out.append(fmt_endpoint(iv.lo, digits, "f"))
        out.append(fmt_endpoint(iv.hi, digits, "c"))
    return out


@dataclass
class SweepResult:
    rows: list
    skipped: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)


class _SweepTask:
    def __init__(self, f, P, hhat, tol):
        self.f, self.P, self.hhat, self.tol = f, P, hhat, tol

    def __call__(self, t):
        try:
            ft = specialize_morphism(self.f, t)
        except DomainError:
            return t, None
        h_t = height_of_rational(t)
        fib = fiber_canonical_height(ft, specialize(self.P, t), self.tol).value
        pred = self.hhat * h_t
        return t, SweepRow(t, h_t, fib, pred, fib - pred)


def variation_sweep(
    f: MorphismFamily,
    P: ProjPointQt,
    H: int,
    tol=Fraction(1, 10**6),
    min_height: float = 0.0,
    workers: Optional[int] = None,
    params: Optional[Iterable] = None,
) -> SweepResult:
    """One row per good-reduction parameter with ``max(|p|, q) <= H`` and ``h(t) >= min_height``."""
    hhat = generic_canonical_height(f, P, Fraction(1, 10**12)).value
    if params is None:
        params = [t for t in enumerate_parameters(H) if height_of_rational(t).hi_float >= min_height]
    results = _pool_map(_SweepTask(f, P, hhat, Fraction(tol)), list(params), workers)
    rows, skipped = [], []
    for t, row in results:
        if row is None:
            skipped.append(t)
        else:
            rows.append(row)
    rows.sort(key=SweepRow.sort_key)
    skipped.sort(key=_t_key)
    return SweepResult(rows, skipped)


def envelope(f: MorphismFamily, P: ProjPointQt, h_t: RealInterval) -> RealInterval:
    """``d (2 C1 + C2 + max(C5, C6)) h(t)^(1/2)``."""
    return constants_bundle(f, P).envelope_factor(f.d) * h_t.sqrt()


def within_envelope(row: SweepRow, bound: RealInterval) -> bool:
    return row.error.abs().certainly_le(bound.lo_fraction())


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    count: int


def exponent_fit(rows: Iterable[SweepRow]) -> FitResult:
    """Least-squares slope of ``log|error|`` against ``log h(t)`` over usable rows."""
    xs, ys = [], []
    for row in rows:
        if row.error.contains_zero():
            continue
        ht = row.h_t.mid()
        if ht < math.e:
            continue
        xs.append(math.log(ht))
        ys.append(math.log(abs(row.error.mid())))
    if len(xs) < 10:
        raise DomainError(f"exponent fit needs at least 10 usable rows, got {len(xs)}")
    A = np.vstack([np.array(xs), np.ones(len(xs))]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, np.array(ys), rcond=None)
    return FitResult(float(slope), float(intercept), len(xs))
