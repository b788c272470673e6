import math
from fractions import Fraction

import pytest
import sympy

from conftest import ONE, T, quad_family
from varheight.dynamics import (
    build_family,
    c3_value,
    constants_bundle,
    corollary_constants,
    family_heights,
    fiber_constants,
    fiber_map_from_forms,
    good_reduction_threshold,
    growth_constants,
    has_good_reduction,
    is_morphism,
    iterate_point,
    monomials,
    specialize_morphism,
)
from varheight.dynamics.certify import degree_sequence, exact_degree_sequence, integer_certificate, polynomial_certificate
from varheight.exact import DomainError, IntPolynomial, RealInterval
from varheight.heights_q import height_of_rational, point_from_ints
from varheight.heights_qt import arith_height, geom_height, qt_from_ints, specialize

LOG2, LOG3 = math.log(2), math.log(3)
ZERO = IntPolynomial(())


def P(*c):
    return IntPolynomial(c)


def close(iv, x, tol=1e-9):
    return iv.lo_float - tol <= x <= iv.hi_float + tol


def random_family(rng, N=1, d=2, deg=2, C=3):
    while True:
        forms = []
        for _ in range(N + 1):
            form = {}
            for m in monomials(N + 1, d):
                if rng.random() < 0.6:
                    c = IntPolynomial([rng.randint(-C, C) for _ in range(rng.randint(1, deg + 1))])
                    if not c.is_zero():
                        form[m] = c
            forms.append(form)
        try:
            return build_family(N, d, forms)
        except DomainError:
            continue


def sylvester_oracle(f):
    # formal-degree Sylvester matrix of the two binary forms, determinant by sympy
    t = sympy.Symbol("t")
    d = f.d
    rows = []
    for form in f.forms:
        coeff = {i: sum(int(a) * t**k for k, a in enumerate(c.coeffs)) for (i, _), c in form}
        vec = [coeff.get(d - j, 0) for j in range(d + 1)]
        for shift in range(d):
            rows.append([0] * shift + vec + [0] * (d - 1 - shift))
    return sympy.Poly(sympy.Matrix(rows).det(), t)


# -- building -----------------------------------------------------------------


def test_build_family_examples(x2t):
    assert x2t.resultant == ONE
    assert x2t.certificate.method == "sylvester"
    with pytest.raises(DomainError, match=r"not a morphism family.*\[1 : 0\]"):
        build_family(1, 2, [{(1, 1): 1}, {(0, 2): 1}])
    g = build_family(1, 2, [{(2, 0): 1}, {(0, 2): 1, (2, 0): P(0, -1)}])
    assert not g.resultant.is_zero()


def test_build_family_clears_denominators():
    f = build_family(1, 2, [{(2, 0): (P(2), P(3)), (0, 2): (P(0, 4), P(3))}, {(0, 2): (P(2), P(1))}])
    assert [c for _, c in f.forms[0]] == [P(1), P(0, 2)]
    assert [c for _, c in f.forms[1]] == [P(3)]


def test_sylvester_oracle_random(rng):
    for _ in range(15):
        f = random_family(rng, d=rng.choice([2, 3]))
        expect = sylvester_oracle(f)
        coeffs = [int(c) for c in reversed(expect.all_coeffs())]
        ours = f.resultant
        # equal up to sign and integer content
        q = Fraction(coeffs[-1], ours.leading)
        assert [Fraction(c) for c in coeffs] == [q * c for c in ours.coeffs]


def test_macaulay_n2_certificate():
    f = build_family(2, 2, [{(2, 0, 0): 1, (0, 0, 2): T}, {(0, 2, 0): 1}, {(0, 0, 2): 1}])
    assert f.certificate.method in ("macaulay", "minor-gcd")
    assert f.certificate.matrix_size == 15
    assert not f.resultant.is_zero()
    # a(t0) != 0 implies good reduction; check the implication on a few values
    for t in range(-3, 4):
        if f.resultant(t) != 0:
            assert is_morphism(specialize_morphism(f, t).forms, 2, 2)


def test_family_heights_examples(x2t):
    hg, ha, ht = family_heights(x2t)
    assert hg == 1 and ha.contains(0) and ht.contains(1)
    hg, ha, ht = family_heights(build_family(1, 2, [{(2, 0): 1}, {(0, 2): 1}]))
    assert hg == 0 and ha.contains(0)
    hg, ha, ht = family_heights(build_family(1, 2, [{(2, 0): 2, (0, 2): P(0, 0, 0, 3)}, {(0, 2): 1}]))
    assert hg == 3 and close(ha, LOG3) and close(ht, 3 + LOG3)


# -- iteration and specialization ------------------------------------------------


def test_iterate_point_examples(x2t, origin):
    assert iterate_point(x2t, origin, 1).coords == (T, ONE)
    assert iterate_point(x2t, origin, 2).coords == (P(0, 1, 1), ONE)
    third = iterate_point(x2t, origin, 3)
    assert third.coords == (P(0, 1, 1) * P(0, 1, 1) + T, ONE)
    assert geom_height(third) == 4


def test_specialize_morphism_examples(x2t):
    assert str(specialize_morphism(x2t, 3)) == "[x^2 + 3*y^2 : y^2]"
    assert str(specialize_morphism(x2t, -1)) == "[x^2 - y^2 : y^2]"
    with pytest.raises(DomainError, match="bad reduction at t = inf"):
        specialize_morphism(x2t, None)
    g = build_family(1, 2, [{(2, 0): 1, (0, 2): T}, {(2, 0): 1, (0, 2): 1}])
    assert g.resultant(1) == 0
    with pytest.raises(DomainError, match="bad reduction at t = 1"):
        specialize_morphism(g, 1)
    assert not has_good_reduction(g, 1) and has_good_reduction(g, 2)


def test_fiber_map_from_forms_rejects_common_zero():
    with pytest.raises(DomainError):
        fiber_map_from_forms(1, 2, [{(1, 1): 1}, {(0, 2): 1}])
    fm = fiber_map_from_forms(1, 2, [{(2, 0): 1, (0, 2): -1}, {(0, 2): 1}])
    assert fm(point_from_ints([0, 1])).coords == (1, -1) or fm(point_from_ints([0, 1])).coords == (-1, 1)


def test_specialization_compatibility(rng):
    for _ in range(8):
        f = random_family(rng, deg=1, C=2)
        Pt = qt_from_ints([IntPolynomial([rng.randint(-2, 2), rng.randint(-2, 2)]) or ONE, ONE])
        for t in (Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(3)):
            if not has_good_reduction(f, t):
                continue
            ft = specialize_morphism(f, t)
            Q = specialize(Pt, t)
            for k in range(4):
                assert specialize(iterate_point(f, Pt, k), t) == Q
                Q = ft(Q)


# -- constants -------------------------------------------------------------------------


def test_fiber_constants_examples(x2t):
    C1, C2, C3 = fiber_constants(x2t)
    assert C3 == 8 == c3_value(1, 2)
    assert C1.contains(8)
    assert close(C2, 34 * LOG2)


def test_growth_constants_examples(x2t, origin):
    C4, C5, C6 = growth_constants(x2t, origin)
    assert C4.contains(1)
    assert close(C5, 5 * LOG2 + LOG3)
    assert close(C6, 4 * (5 * LOG2 + LOG3) + 14 * LOG2)


def test_corollary_constants_examples():
    C7, C8, C9, C = corollary_constants(1, 2)
    c7 = LOG3 + 2 * LOG2
    assert close(C7, c7) and close(C8, 2 * LOG2)
    c9 = 2 * (2 * (2 * 8 + 2 * 64 + 2 * LOG2) + 24 + 26 + 4 * c7 + LOG2)
    assert close(C9, c9)
    assert close(C, c9 * c9, 1e-6)


def test_good_reduction_threshold_examples(x2t):
    assert close(good_reduction_threshold(x2t), 32 * LOG2)
    assert close(good_reduction_threshold(build_family(1, 2, [{(2, 0): 1}, {(0, 2): 1}])), 24 * LOG2)


def test_constants_bundle_nonnegative(x2t, origin):
    b = constants_bundle(x2t, origin)
    for name, v in b.items():
        assert (v >= 0) if isinstance(v, int) else v.certainly_ge(0), name
    assert close(b.envelope_factor(2), 2 * (16 + 34 * LOG2 + 4 * (5 * LOG2 + LOG3) + 14 * LOG2))


# -- growth properties ------------------------------------------------------------------------


def test_degree_sandwich_and_growth(rng):
    for _ in range(6):
        f = random_family(rng, deg=1, C=2)
        Pt = qt_from_ints([IntPolynomial([rng.randint(-2, 2), 1]), ONE])
        C1, C2, C3 = fiber_constants(f)
        C4, C5, _ = growth_constants(f, Pt)
        hg_f = family_heights(f)[0]
        Q = Pt
        for k in range(6):
            nxt = iterate_point(f, Q, 1)
            assert abs(f.d * geom_height(Q) - geom_height(nxt)) <= C3 * hg_f
            assert (C4 * f.d**k).certainly_ge(geom_height(Q))
            assert arith_height(Q).certainly_le(C5 * f.d**k)
            Q = nxt


def test_degree_tracker_matches_exact_iteration(x2t, origin, rng):
    assert degree_sequence(x2t, origin, 12) == [0] + [2 ** (k - 1) for k in range(1, 13)]
    for _ in range(5):
        f = random_family(rng, deg=1, C=2)
        Pt = qt_from_ints([IntPolynomial([rng.randint(-2, 2), 1]), ONE])
        assert degree_sequence(f, Pt, 6) == exact_degree_sequence(f, Pt, 6)


def test_fiber_one_step_bound(rng):
    f = quad_family()
    C1, C2, _ = fiber_constants(f)
    for _ in range(20):
        t = Fraction(rng.randint(-30, 30), rng.randint(1, 30))
        ft = specialize_morphism(f, t)
        B_closed = C1 * height_of_rational(t) + C2
        B_map = integer_certificate(ft).step_bound()
        for _ in range(5):
            Q = point_from_ints([rng.randint(-10**4, 10**4), rng.randint(1, 10**4)])
            gap = RealInterval.log_of(Fraction(Q.max_abs() ** 2, ft(Q).max_abs())).abs()
            assert gap.certainly_le(B_closed)
            assert gap.certainly_le(B_map)


def test_certificates_x2t(x2t):
    ft = specialize_morphism(x2t, 1)
    cert = integer_certificate(ft)
    assert cert.a == 1 and cert.S == 2
    assert close(cert.step_bound(), LOG2)
    assert polynomial_certificate(x2t).step_bound(1) == 1
