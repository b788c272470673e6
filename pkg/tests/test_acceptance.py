"""Acceptance criteria 1 to 10, one test each.

Every test prints ``criterion N: PASS`` or ``criterion N: FAIL`` with its
runtime; the lines are also collected into the pytest terminal summary.
"""

import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import mpmath
import sympy

from conftest import ACCEPTANCE_LINES, ONE, T, quad_family
from varheight.canonical import (
    corollary_bound,
    envelope,
    exponent_fit,
    fiber_canonical_height,
    generic_canonical_height,
    preperiodic_parameter_search,
    variation_sweep,
    within_envelope,
)
from varheight.dynamics import (
    build_family,
    corollary_constants,
    fiber_constants,
    has_good_reduction,
    iterate_point,
    specialize_morphism,
)
from varheight.exact import (
    INFINITY,
    IntPolynomial,
    NotCoprimeError,
    Place,
    RealInterval,
    bezout_cofactors,
    leibniz_det,
    minor_solution,
    poly_sup_norm,
    product_formula_sum,
)
from varheight.heights_q import height_of_rational, point_from_ints, tuple_height_int, weil_height
from varheight.heights_qt import geom_height, normalize_qt, qt_from_ints, specialization_bounds, specialize
from varheight.multibundle import eigen_bundle, segre_join, spectral_radius, variation_exponent_bound

SEED = 1729
PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


@contextmanager
def criterion(n: int, budget: float):
    """Run a criterion body; PASS needs every check to hold and the runtime to fit the budget."""
    start = time.perf_counter()
    ok = False
    info: dict = {}
    try:
        yield info
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        in_time = elapsed < budget
        verdict = "PASS" if ok and in_time else "FAIL"
        note = "" if in_time else f" over budget {budget:g}s"
        extra = "".join(f", {k} {v}" for k, v in info.items())
        line = f"criterion {n}: {verdict} ({elapsed:.2f}s{extra}){note}"
        print(line)
        ACCEPTANCE_LINES.append(line)
    assert in_time, line


def rand_poly(rng, deg, C):
    return IntPolynomial([rng.randint(-C, C) for _ in range(deg + 1)])


# 1 -------------------------------------------------------------------------------------------


def test_criterion_1_product_formula():
    rng = random.Random(SEED + 1)
    xs = []
    while len(xs) < 1000:
        n, d = rng.randint(-10**6, 10**6), rng.randint(1, 10**6)
        if n:
            xs.append(Fraction(n, d))
    with criterion(1, 1.0):
        for x in xs:
            assert product_formula_sum(x).is_zero(), x


# 2 -------------------------------------------------------------------------------------------


def test_criterion_2_gauss_gelfond():
    rng = random.Random(SEED + 2)
    pairs = []
    while len(pairs) < 500:
        f, g = rand_poly(rng, rng.randint(0, 10), 10**4), rand_poly(rng, rng.randint(0, 10), 10**4)
        if not f.is_zero() and not g.is_zero():
            pairs.append((f, g, rng.sample(PRIMES, 5)))
    with criterion(2, 5.0):
        for f, g, primes in pairs:
            fg = f * g
            for p in primes:
                v = Place(p)
                assert poly_sup_norm(fg, v) == poly_sup_norm(f, v) * poly_sup_norm(g, v)
            nf, ng, nfg = (poly_sup_norm(x, INFINITY) for x in (f, g, fg))
            assert (nf * ng / 2 ** fg.degree).certainly_le(nfg)
            assert nfg.certainly_le(nf * ng * (g.degree + 1))


# 3 -------------------------------------------------------------------------------------------


def test_criterion_3_specialization_sandwich():
    rng = random.Random(SEED + 3)
    points = []
    while len(points) < 200:
        N, D = rng.randint(1, 3), rng.randint(0, 6)
        coords = [rand_poly(rng, rng.randint(0, D), 50) for _ in range(N + 1)]
        if any(not c.is_zero() for c in coords):
            P = normalize_qt(coords)
            if geom_height(P) <= 6:
                points.append(P)
    params = [[Fraction(rng.randint(-1000, 1000), rng.randint(1, 1000)) for _ in range(20)] for _ in points]
    with criterion(3, 30.0):
        for P, ts in zip(points, params):
            b = specialization_bounds(P)
            D = geom_height(P)
            for t in ts:
                h = weil_height(specialize(P, t))
                if b.degenerate:
                    assert h == b.exact_height
                    continue
                gap = height_of_rational(t) * D - h
                assert b.lower.certainly_le(gap) and gap.certainly_le(b.upper), (P, t)


# 4 -------------------------------------------------------------------------------------------


def test_criterion_4_generic_height():
    f = quad_family()
    origin = qt_from_ints([IntPolynomial(()), ONE])
    with criterion(4, 10.0):
        r = generic_canonical_height(f, origin, Fraction(1, 10**9))
        assert r.value.contains(Fraction(1, 2))
        assert r.value.width().hi_fraction() <= Fraction(1, 10**9)
        assert r.k <= 32
        Q = origin
        for k in range(1, 13):
            Q = iterate_point(f, Q, 1)
            assert geom_height(Q) == 2 ** (k - 1)


# 5 -------------------------------------------------------------------------------------------


def brute_force_preperiodic(H):
    C1, C2, _ = fiber_constants(quad_family())
    out = []
    for q in range(1, H + 1):
        for p in range(-H, H + 1):
            if math.gcd(p, q) != 1:
                continue
            t = Fraction(p, q)
            cutoff = 10 * (C1.hi_float * math.log(max(abs(p), q)) + C2.hi_float)
            seen, x = set(), Fraction(0)
            while x not in seen:
                seen.add(x)
                if math.log(max(abs(x.numerator), x.denominator)) > cutoff:
                    break
                x = x * x + t
            else:
                out.append(t)
    return sorted(out)


def test_criterion_5_preperiodic_search():
    f = quad_family()
    origin = qt_from_ints([IntPolynomial(()), ONE])
    with criterion(5, 120.0):
        res = preperiodic_parameter_search(f, origin, 50)
        found = sorted(res.parameters())
        assert found == [-2, -1, 0] == brute_force_preperiodic(50)
        C = corollary_constants(1, 2)[3]
        bound = corollary_bound(f, origin, res.hhat)
        # equals 64 C up to the certified slack of h_hat below 1/2
        assert bound.certainly_ge(64 * C.lo_fraction())
        assert abs(bound.hi_fraction() / (64 * C.lo_fraction()) - 1) < Fraction(1, 10**8)
        # h(0) = h(-1) = 0 while h(-2) = log 2; all three lie far below the bound
        assert height_of_rational(0).contains(0) and height_of_rational(-1).contains(0)
        for t in found:
            assert height_of_rational(t).certainly_le(bound.lo_fraction())


# 6 -------------------------------------------------------------------------------------------


def test_criterion_6_envelope():
    f = quad_family()
    origin = qt_from_ints([IntPolynomial(()), ONE])
    with criterion(6, 300.0) as info:
        res = variation_sweep(f, origin, 100, tol=Fraction(1, 10**6), min_height=1.0)
        rows = [r for r in res.rows if r.h_t.certainly_ge(1)]
        assert len(rows) > 10000
        assert all(has_good_reduction(f, r.t) for r in rows[:50])
        factor = envelope(f, origin, RealInterval.exact(1))
        for r in rows:
            bound = factor * r.h_t.sqrt()
            assert within_envelope(r, bound), r.t
        fit = exponent_fit(rows)
        info["rows"] = len(rows)
        info["slope"] = f"{fit.slope:.4f}"
        assert fit.slope <= 0.75


# 7 -------------------------------------------------------------------------------------------


def _random_fiber_pairs(rng, count):
    pairs = []
    fams = [quad_family(), quad_family(IntPolynomial((0, -1)))]
    fams.append(build_family(1, 3, [{(3, 0): 1, (1, 2): T}, {(0, 3): 1}]))
    fams.append(build_family(2, 2, [{(2, 0, 0): 1, (0, 0, 2): T}, {(0, 2, 0): 1, (1, 1, 0): 1}, {(0, 0, 2): 1}]))
    while len(pairs) < count:
        f = rng.choice(fams)
        t = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        if not has_good_reduction(f, t):
            continue
        Q = point_from_ints([rng.randint(-20, 20) for _ in range(f.N)] + [rng.randint(1, 20)])
        pairs.append((specialize_morphism(f, t), Q))
    return pairs


def test_criterion_7_functional_equation():
    rng = random.Random(SEED + 7)
    pairs = _random_fiber_pairs(rng, 50)
    tol = Fraction(1, 10**8)
    with criterion(7, 30.0):
        for fm, Q in pairs:
            a = fiber_canonical_height(fm, fm(Q), tol).value
            b = fiber_canonical_height(fm, Q, tol).value * fm.d
            assert a.overlaps(b), (str(fm), Q)
            assert abs(a.mid() - b.mid()) < 1e-6


# 8 -------------------------------------------------------------------------------------------


def test_criterion_8_spectral():
    A = [[15, -4], [4, -1]]
    with criterion(8, 1.0):
        s3 = sympy.sqrt(3)
        rho_exact = 7 + 4 * s3
        assert sympy.expand((2 + s3) ** 2 - rho_exact) == 0
        ref = mpmath.mpf(str(sympy.N(rho_exact, 40)))
        rho = spectral_radius(A)
        eb = eigen_bundle(A)
        for iv in (rho, eb.alpha):
            assert abs(iv.mid() - float(ref)) < 1e-10 and iv.width_float() < 1e-10
        t = sympy.Symbol("t")
        mp = sum(int(c) * t**k for k, c in enumerate(eb.minimal_polynomial.coeffs))
        assert sympy.expand(mp.subs(t, rho_exact)) == 0
        for eps in (Fraction(0), Fraction(1, 100), Fraction(1, 4)):
            v = variation_exponent_bound(eb.alpha, eb.alpha, eps)
            assert abs(v.mid() - (0.5 + float(eps))) < 1e-10
            assert v.contains(Fraction(1, 2) + eps)


# 9 -------------------------------------------------------------------------------------------


def test_criterion_9_segre():
    rng = random.Random(SEED + 9)

    def point():
        while True:
            coords = [rand_poly(rng, rng.randint(0, 4), 30) for _ in range(rng.randint(2, 4))]
            if any(not c.is_zero() for c in coords):
                return normalize_qt(coords)

    pairs = [(point(), point()) for _ in range(200)]
    with criterion(9, 10.0):
        for P, Q in pairs:
            J = segre_join(P, Q)
            D = geom_height(P) + geom_height(Q)
            assert geom_height(J) == D
            ratio = Fraction(tuple_height_int(J.all_coeffs()),
                             tuple_height_int(P.all_coeffs()) * tuple_height_int(Q.all_coeffs()))
            defect = RealInterval.log_of(ratio).abs()
            assert defect.certainly_le(RealInterval.log_of(2) * D) or ratio == 1


# 10 ------------------------------------------------------------------------------------------


def _sympy_gcd(fs):
    t = sympy.Symbol("t")
    g = 0
    for f in fs:
        g = sympy.gcd(g, sum(int(c) * t**k for k, c in enumerate(f.coeffs)))
    return sympy.Poly(g, t)


def test_criterion_10_bezout_and_minors():
    rng = random.Random(SEED + 10)
    coprime = []
    while len(coprime) < 200:
        fs = [rand_poly(rng, rng.randint(0, 5), 20) for _ in range(rng.randint(2, 4))]
        if all(f.is_zero() for f in fs) or max(f.degree for f in fs) < 1:
            continue
        if _sympy_gcd(fs).degree() == 0:
            coprime.append(fs)
    shared = []
    while len(shared) < 50:
        g = rand_poly(rng, rng.randint(1, 2), 9)
        if g.degree < 1:
            continue
        fs = [g * rand_poly(rng, rng.randint(0, 3), 9) for _ in range(rng.randint(2, 3))]
        if any(not f.is_zero() for f in fs):
            shared.append(fs)
    matrices = []
    for _ in range(100):
        q, p = rng.randint(1, 5), rng.randint(1, 6)
        M = [[rng.randint(-4, 4) for _ in range(p)] for _ in range(q)]
        if q > 1 and rng.random() < 0.4:
            M[-1] = [a - b for a, b in zip(M[0], M[1 % q])]
        matrices.append((M, rng.randrange(p)))

    with criterion(10, 10.0):
        for fs in coprime:
            d = max(f.degree for f in fs)
            a, cof = bezout_cofactors(fs, d)
            assert a != 0 and all(A.degree <= d - 1 for A in cof)
            total = IntPolynomial(())
            for f, A in zip(fs, cof):
                total = total + f * A
            assert total == IntPolynomial.constant(a)
        for fs in shared:
            try:
                bezout_cofactors(fs, max(f.degree for f in fs))
            except NotCoprimeError as exc:
                expect = _sympy_gcd(fs)
                assert exc.gcd.degree == expect.degree() >= 1
                assert str(exc).startswith("not coprime: ")
            else:
                raise AssertionError(f"accepted non-coprime tuple {fs}")
        for M, s in matrices:
            sol = minor_solution(M, s)
            forced = all(v[s] == 0 for v in sympy.Matrix(M).nullspace())
            assert (sol is None) == forced
            if sol is None:
                continue
            assert all(sum(a * b for a, b in zip(row, sol.x)) == 0 for row in M)
            assert sol.x[s] != 0
            for xj, prov in zip(sol.x, sol.provenance):
                if prov is None:
                    assert xj == 0
                    continue
                sign, rows, cols = prov
                assert len(rows) == len(cols) == sol.rank
                assert xj == sign * leibniz_det([[M[i][j] for j in cols] for i in rows])
