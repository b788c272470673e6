"""Exact integers, polynomials, places, certified intervals and elimination."""

from .errors import DomainError, NotCoprimeError
from .interval import (
    RealInterval,
    max_interval,
    min_interval,
    precision,
    set_working_precision,
    working_precision,
)
from .linalg import MinorSolution, bareiss_det, bezout_cofactors, leibniz_det, minor_solution, rank, solve_adjugate
from .places import INFINITY, LogLattice, Place, abs_at_place, log_abs_symbolic, poly_sup_norm, product_formula_sum
from .poly import IntPolynomial, content_and_primitive, poly_gcd, poly_gcd_many

__all__ = [
    "DomainError",
    "NotCoprimeError",
    "RealInterval",
    "max_interval",
    "min_interval",
    "precision",
    "set_working_precision",
    "working_precision",
    "MinorSolution",
    "bareiss_det",
    "bezout_cofactors",
    "leibniz_det",
    "minor_solution",
    "rank",
    "solve_adjugate",
    "INFINITY",
    "LogLattice",
    "Place",
    "abs_at_place",
    "log_abs_symbolic",
    "poly_sup_norm",
    "product_formula_sum",
    "IntPolynomial",
    "content_and_primitive",
    "poly_gcd",
    "poly_gcd_many",
]
