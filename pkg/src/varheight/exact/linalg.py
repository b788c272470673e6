"""Exact linear algebra over Z and Z[t].

Fraction-free (Bareiss) elimination for determinants and adjugate solves,
plus the two elimination facts the height bounds rest on: homogeneous
systems have solutions made of signed minors, and coprime polynomials of
degree <= d admit Bezout cofactors of degree <= d - 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from fractions import Fraction
from itertools import permutations
from typing import Optional, Sequence, Union

from .errors import DomainError, NotCoprimeError
from .poly import IntPolynomial, ZERO_POLY, poly_gcd_many

Entry = Union[int, IntPolynomial]
Matrix = Sequence[Sequence[Entry]]


def _is_zero(x: Entry) -> bool:
    return x == 0


def _uniform(M: Matrix) -> list[list[Entry]]:
    """Copy ``M``, promoting every entry to IntPolynomial if any entry is one."""
    rows = [list(r) for r in M]
    if any(isinstance(x, IntPolynomial) for r in rows for x in r):
        rows = [[x if isinstance(x, IntPolynomial) else IntPolynomial.constant(x) for x in r] for r in rows]
    return rows


def bareiss_det(M: Matrix) -> Entry:
    """Determinant of a square matrix over Z or Z[t] by Bareiss elimination."""
    n = len(M)
    if n == 0:
        return 1
    if any(len(r) != n for r in M):
        raise ValueError("determinant of a non-square matrix")
    A = _uniform(M)
    poly = isinstance(A[0][0], IntPolynomial)
    sign = 1
    prev: Entry = 1
    for k in range(n - 1):
        if _is_zero(A[k][k]):
            swap = next((i for i in range(k + 1, n) if not _is_zero(A[i][k])), None)
            if swap is None:
                return ZERO_POLY if poly else 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        piv = A[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * piv - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = piv
    det = A[n - 1][n - 1]
    return det if sign == 1 else -det


def leibniz_det(M: Matrix) -> Entry:
    """Determinant by the permutation expansion.  Slow; used as an oracle."""
    n = len(M)
    if n == 0:
        return 1
    total: Entry = 0
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term: Entry = 1
        for i in range(n):
            term = term * M[i][perm[i]]
            if _is_zero(term):
                break
        if not _is_zero(term):
            total = total - term if inv % 2 else total + term
    return total


def rank(M: Matrix) -> int:
    """Rank over the fraction field (Q or Q(t))."""
    if not M or not M[0]:
        return 0
    A = _uniform(M)
    rows, cols = len(A), len(A[0])
    r = 0
    prev: Entry = 1
    for c in range(cols):
        piv_row = next((i for i in range(r, rows) if not _is_zero(A[i][c])), None)
        if piv_row is None:
            continue
        A[r], A[piv_row] = A[piv_row], A[r]
        piv = A[r][c]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                A[i][j] = (A[i][j] * piv - A[i][c] * A[r][j]) // prev
            A[i][c] = 0
        prev = piv
        r += 1
        if r == rows:
            break
    return r


def solve_adjugate(M: Matrix, rhs: Sequence[Sequence[Entry]]) -> tuple[Entry, list[list[Entry]]]:
    """Fraction-free solve of ``M X = det(M) * B`` for nonsingular square ``M``.

    ``rhs`` is a list of right-hand-side columns.  Returns ``(det, X)`` where
    each solution column is ``adj(M) b``, so its entries lie in the base ring.
    """
    n = len(M)
    k = len(rhs)
    A = _uniform([list(M[i]) + [rhs[c][i] for c in range(k)] for i in range(n)])
    poly = isinstance(A[0][0], IntPolynomial) if n else False
    sign = 1
    prev: Entry = 1
    for p in range(n):
        if _is_zero(A[p][p]):
            swap = next((i for i in range(p + 1, n) if not _is_zero(A[i][p])), None)
            if swap is None:
                raise DomainError("singular matrix")
            A[p], A[swap] = A[swap], A[p]
            sign = -sign
        piv = A[p][p]
        for i in range(p + 1, n):
            for j in range(p + 1, n + k):
                A[i][j] = (A[i][j] * piv - A[i][p] * A[p][j]) // prev
            A[i][p] = 0
        prev = piv
    det = A[n - 1][n - 1]
    # the rhs columns were eliminated along with M; scale to recover det * b
    sols = []
    for c in range(k):
        x: list[Entry] = [0] * n
        for i in range(n - 1, -1, -1):
            acc = det * A[i][n + c]
            for j in range(i + 1, n):
                acc = acc - A[i][j] * x[j]
            x[i] = acc // A[i][i]
        sols.append(x)
    # row swaps flip the sign of det, and adj(M) b = det(M) * M^{-1} b
    if sign == -1:
        det = -det
        sols = [[-v for v in col] for col in sols]
    if poly:
        sols = [[v if isinstance(v, IntPolynomial) else IntPolynomial.constant(v) for v in col] for col in sols]
    return det, sols


# -- signed-minor solutions -------------------------------------------------


@dataclass(frozen=True)
class MinorSolution:
    """A solution of ``M x = 0`` whose entries are signed ``r x r`` minors.

    ``provenance[j]`` is ``(sign, rows, cols)`` with
    ``x[j] == sign * det(M[rows, cols])``, or ``None`` where ``x[j] == 0``.
    """

    x: tuple
    rank: int
    rows: tuple
    cols: tuple
    provenance: tuple


def _submatrix(M: Matrix, rows: Sequence[int], cols: Sequence[int]) -> list[list[Entry]]:
    return [[M[i][j] for j in cols] for i in rows]


def _greedy_basis_columns(M: Matrix, r: int) -> tuple[int, ...]:
    chosen: list[int] = []
    p = len(M[0])
    for j in range(p):
        trial = chosen + [j]
        if rank(_submatrix(M, range(len(M)), trial)) == len(trial):
            chosen = trial
            if len(chosen) == r:
                break
    return tuple(chosen)


def _greedy_basis_rows(M: Matrix, cols: Sequence[int], r: int) -> tuple[int, ...]:
    chosen: list[int] = []
    for i in range(len(M)):
        trial = chosen + [i]
        if rank(_submatrix(M, trial, cols)) == len(trial):
            chosen = trial
            if len(chosen) == r:
                break
    return tuple(chosen)


def minor_solution(M: Matrix, s: int) -> Optional[MinorSolution]:
    """Solution of the homogeneous system ``M x = 0`` with ``x[s] != 0``.

    Every entry is a signed ``r x r`` minor of ``M`` (``r`` the rank), taken
    from the lexicographically earliest nonvanishing ``r x r`` minor.
    Returns ``None`` when the system forces ``x[s] = 0``.  ``s`` is 0-based.
    """
    if not M:
        raise ValueError("empty coefficient matrix")
    p = len(M[0])
    if any(len(row) != p for row in M):
        raise ValueError("ragged coefficient matrix")
    if not 0 <= s < p:
        raise ValueError(f"column index {s} out of range for {p} unknowns")
    poly = any(isinstance(x, IntPolynomial) for row in M for x in row)
    zero: Entry = ZERO_POLY if poly else 0
    one: Entry = IntPolynomial.constant(1) if poly else 1

    r = rank(M)
    if r == 0:
        x = [zero] * p
        x[s] = one
        prov = [None] * p
        prov[s] = (1, (), ())
        return MinorSolution(tuple(x), 0, (), (), tuple(prov))
    if r == p:
        return None

    J = _greedy_basis_columns(M, r)
    I = _greedy_basis_rows(M, J, r)
    base = _submatrix(M, I, J)
    delta = bareiss_det(base)

    def replaced(i: int, k: int) -> tuple[Entry, tuple[int, ...]]:
        # det of the basis minor with its i-th column swapped for column k
        cols = list(J)
        cols[i] = k
        return bareiss_det(_submatrix(M, I, cols)), tuple(cols)

    x: list[Entry] = [zero] * p
    prov: list = [None] * p
    if s not in J:
        k = s
        x[k] = delta
        prov[k] = (1, I, J)
        for i, j in enumerate(J):
            val, cols = replaced(i, k)
            x[j] = -val
            prov[j] = (-1, I, cols) if not _is_zero(val) else None
    else:
        i_s = J.index(s)
        k = next((k for k in range(p) if k not in J and not _is_zero(replaced(i_s, k)[0])), None)
        if k is None:
            return None
        x[k] = -delta
        prov[k] = (-1, I, J)
        for i, j in enumerate(J):
            val, cols = replaced(i, k)
            x[j] = val
            prov[j] = (1, I, cols) if not _is_zero(val) else None
    return MinorSolution(tuple(x), r, I, J, tuple(prov))


# -- Bezout cofactors --------------------------------------------------------


def _coefficient_system(fs: Sequence[IntPolynomial], d: int) -> list[list[int]]:
    """Matrix of ``sum f_i A_i - a = 0`` in the unknowns (A_0, ..., A_N, a).

    ``A_i`` contributes ``d`` unknowns (coefficients of t^0..t^(d-1)); the last
    unknown is ``a``.  Rows are the coefficients of t^0 .. t^(2d-1).
    """
    n_rows = 2 * d
    n_cols = len(fs) * d + 1
    M = [[0] * n_cols for _ in range(n_rows)]
    for i, f in enumerate(fs):
        for j in range(d):
            for deg, c in enumerate(f.coeffs):
                M[deg + j][i * d + j] += c
    M[0][n_cols - 1] = -1
    return M


def bezout_cofactors(fs: Sequence[IntPolynomial], d: int) -> tuple[int, list[IntPolynomial]]:
    """Integer ``a != 0`` and ``A_i`` with ``deg A_i <= d - 1`` and ``a = sum f_i A_i``.

    Raises :class:`NotCoprimeError` (carrying the gcd) when the ``f_i`` share
    a nontrivial factor.
    """
    fs = [f if isinstance(f, IntPolynomial) else IntPolynomial.constant(f) for f in fs]
    if all(f.is_zero() for f in fs):
        raise DomainError("all polynomials are zero")
    if d < 1:
        raise DomainError("degree bound must be >= 1")
    if any(f.degree > d for f in fs):
        raise DomainError(f"some polynomial has degree > {d}")
    M = _coefficient_system(fs, d)
    sol = minor_solution(M, len(M[0]) - 1)
    if sol is None:
        raise NotCoprimeError(poly_gcd_many(fs))
    vals = list(sol.x)
    g = 0
    for v in vals:
        g = gcd(g, v)
    if vals[-1] < 0:
        g = -g
    vals = [v // g for v in vals]
    a = vals[-1]
    cof = [IntPolynomial(vals[i * d:(i + 1) * d]) for i in range(len(fs))]
    total = ZERO_POLY
    for f, A in zip(fs, cof):
        total = total + f * A
    if total != IntPolynomial.constant(a) or a == 0:
        raise AssertionError("Bezout identity failed to verify")
    return a, cof


def fraction_rank(M: Sequence[Sequence[Fraction]]) -> int:
    """Rank of a rational matrix (plain Gaussian elimination)."""
    A = [[Fraction(x) for x in row] for row in M]
    if not A:
        return 0
    rows, cols = len(A), len(A[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, rows):
            if A[i][c]:
                f = A[i][c] / A[r][c]
                for j in range(c, cols):
                    A[i][j] -= f * A[r][j]
        r += 1
        if r == rows:
            break
    return r
