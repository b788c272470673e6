"""Text formats: family files, point files and inline point strings.

Family files are YAML documents::

    N: 1
    d: 2
    forms:
      - - [[2, 0], ["1"]]          # x^2 with coefficient 1
        - [[0, 2], ["0", "1"]]     # t y^2
      - - [[0, 2], ["1"]]          # y^2

Each term is ``[exponent_vector, coefficient]`` where the coefficient is a
list of integer strings (lowest degree first) or a mapping
``{num: [...], den: [...]}`` for a rational function.  A term may also be
written as a mapping ``{exponents: [...], coeff: ...}``.

Point files hold ``point:`` followed by a list of coordinates, each either a
rational string (a point over Q) or a coefficient list (a point over Q(t)).
Inline points are strings such as ``"0"``, ``"1/2"``, ``"1:2:3"`` or
``"t^2 + 1 : t"``; a single value ``v`` stands for ``[v : 1]``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional

import sympy
import yaml

from .dynamics.family import MorphismFamily, build_family
from .exact import IntPolynomial
from .heights_q import ProjPointQ, normalize_point
from .heights_qt import ProjPointQt, normalize_qt


class FormatError(ValueError):
    """Malformed input text; the message carries ``line:column`` when known."""


def _where(node, source: str) -> str:
    m = node.start_mark
    return f"{source}:{m.line + 1}:{m.column + 1}"


def _fail(node, source: str, msg: str):
    raise FormatError(f"{_where(node, source)}: {msg}")


def _compose(text: str, source: str):
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f"{source}:{mark.line + 1}:{mark.column + 1}" if mark else source
        raise FormatError(f"{loc}: {getattr(exc, 'problem', exc)}") from None
    if node is None:
        raise FormatError(f"{source}: empty document")
    return node


def _mapping(node, source: str) -> dict:
    if not isinstance(node, yaml.MappingNode):
        _fail(node, source, "expected a mapping")
    out = {}
    for k, v in node.value:
        out[str(k.value)] = v
    return out


def _sequence(node, source: str) -> list:
    if not isinstance(node, yaml.SequenceNode):
        _fail(node, source, "expected a list")
    return list(node.value)


def _int(node, source: str) -> int:
    if not isinstance(node, yaml.ScalarNode):
        _fail(node, source, "expected an integer")
    try:
        return int(str(node.value).strip())
    except ValueError:
        _fail(node, source, f"not an integer: {node.value!r}")


def _poly(node, source: str) -> IntPolynomial:
    items = _sequence(node, source)
    if not items:
        _fail(node, source, "empty coefficient list")
    return IntPolynomial([_int(item, source) for item in items])


def _coeff(node, source: str):
    if isinstance(node, yaml.MappingNode):
        m = _mapping(node, source)
        if set(m) - {"num", "den"} or "num" not in m:
            _fail(node, source, "rational coefficient needs keys num and den")
        num = _poly(m["num"], source)
        den = _poly(m["den"], source) if "den" in m else IntPolynomial.constant(1)
        if den.is_zero():
            _fail(m["den"], source, "zero denominator")
        return (num, den)
    return _poly(node, source)


def parse_family_text(text: str, source: str = "<family>") -> MorphismFamily:
    root = _mapping(_compose(text, source), source)
    for key in ("N", "d", "forms"):
        if key not in root:
            raise FormatError(f"{source}: missing key {key!r}")
    N = _int(root["N"], source)
    d = _int(root["d"], source)
    if N < 1:
        _fail(root["N"], source, "N must be >= 1")
    if d < 2:
        _fail(root["d"], source, "d must be >= 2")
    forms_node = root["forms"]
    forms = _sequence(forms_node, source)
    if len(forms) != N + 1:
        _fail(forms_node, source, f"expected {N + 1} forms, found {len(forms)}")
    raw = []
    for form_node in forms:
        terms: dict = {}
        for term in _sequence(form_node, source):
            if isinstance(term, yaml.MappingNode):
                m = _mapping(term, source)
                if "exponents" not in m or "coeff" not in m:
                    _fail(term, source, "term needs keys exponents and coeff")
                exp_node, coeff_node = m["exponents"], m["coeff"]
            else:
                pair = _sequence(term, source)
                if len(pair) != 2:
                    _fail(term, source, "term must be [exponent_vector, coefficient]")
                exp_node, coeff_node = pair
            exp = tuple(_int(e, source) for e in _sequence(exp_node, source))
            if len(exp) != N + 1:
                _fail(exp_node, source, f"exponent vector needs {N + 1} entries")
            if any(e < 0 for e in exp):
                _fail(exp_node, source, "negative exponent")
            if sum(exp) != d:
                _fail(exp_node, source, f"exponent vector {list(exp)} has degree {sum(exp)}, expected {d}")
            if exp in terms:
                _fail(exp_node, source, f"repeated exponent vector {list(exp)}")
            terms[exp] = _coeff(coeff_node, source)
        raw.append(terms)
    return build_family(N, d, raw)


def parse_family_file(path: str) -> MorphismFamily:
    with open(path, encoding="utf-8") as fh:
        return parse_family_text(fh.read(), path)


def family_to_text(f: MorphismFamily) -> str:
    forms = []
    for form in f.forms:
        forms.append([[list(exp), c.to_strings()] for exp, c in form])
    return yaml.safe_dump({"N": f.N, "d": f.d, "forms": forms}, default_flow_style=None, sort_keys=False)


# -- points -----------------------------------------------------------------------------

_T = sympy.Symbol("t")


def _parse_coordinate(text: str):
    """A rational function of ``t`` as a ``(num, den)`` pair of integer polynomials."""
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals={"t": _T}, rational=True)
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise FormatError(f"cannot parse coordinate {text!r}") from exc
    if expr.free_symbols - {_T}:
        raise FormatError(f"coordinate {text!r} uses variables other than t")
    num, den = sympy.fraction(sympy.together(expr))
    try:
        pn = sympy.Poly(num, _T, domain="QQ")
        pd = sympy.Poly(den, _T, domain="QQ")
    except sympy.PolynomialError as exc:
        raise FormatError(f"coordinate {text!r} is not a rational function of t") from exc
    return _qq_poly(pn), _qq_poly(pd)


def _qq_poly(p: sympy.Poly):
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(p.all_coeffs())]
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return (IntPolynomial([int(c * den) for c in coeffs]), IntPolynomial.constant(den))


def _split(text: str) -> list[str]:
    parts = [p.strip() for p in text.split(":")]
    if any(not p for p in parts):
        raise FormatError(f"empty coordinate in {text!r}")
    return parts if len(parts) > 1 else parts + ["1"]


def parse_point_q(text: str) -> ProjPointQ:
    """Inline point over Q: ``"3/2"`` means ``[3/2 : 1]``, ``"1:2:3"`` a projective point."""
    try:
        vals = [Fraction(p) for p in _split(text)]
    except ValueError as exc:
        raise FormatError(f"cannot parse rational point {text!r}") from exc
    return normalize_point(vals)


def parse_point_qt(text: str) -> ProjPointQt:
    """Inline point over Q(t) such as ``"t^2 + 1 : t"`` or ``"0"``."""
    coords = []
    for part in _split(text):
        num, den = _parse_coordinate(part)
        coords.append(((num[0], num[1]), (den[0], den[1])))
    return normalize_qt(coords)


def parse_point_file(path: str):
    """A point file: returns ProjPointQ or ProjPointQt depending on the coordinates."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    root = _mapping(_compose(text, path), path)
    if "point" not in root:
        raise FormatError(f"{path}: missing key 'point'")
    coords = _sequence(root["point"], path)
    if all(isinstance(c, yaml.ScalarNode) for c in coords):
        try:
            return normalize_point([Fraction(str(c.value)) for c in coords])
        except ValueError as exc:
            raise FormatError(f"{path}: bad rational coordinate") from exc
    return normalize_qt([_poly(c, path) for c in coords])


def parse_point(spec: str, over_qt: bool = True):
    """Inline string, or ``@path`` for a point file."""
    if spec.startswith("@"):
        P = parse_point_file(spec[1:])
        if over_qt and isinstance(P, ProjPointQ):
            return normalize_qt(list(P.coords))
        return P
    return parse_point_qt(spec) if over_qt else parse_point_q(spec)


def parse_parameter(text: str) -> Optional[Fraction]:
    """A parameter value; ``inf`` is the point at infinity (returned as ``None``)."""
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return None
    try:
        return Fraction(text.strip())
    except ValueError as exc:
        raise FormatError(f"cannot parse parameter {text!r}") from exc


def parse_matrix(text: str) -> list[list[int]]:
    """Row-major integer matrix: rows separated by ``;``, entries by ``,``."""
    try:
        rows = [[int(v) for v in row.split(",")] for row in text.split(";") if row.strip()]
    except ValueError as exc:
        raise FormatError(f"cannot parse matrix {text!r}") from exc
    return rows


def parse_weights(text: str) -> list[Fraction]:
    try:
        return [Fraction(v.strip()) for v in text.split(",")]
    except ValueError as exc:
        raise FormatError(f"cannot parse weights {text!r}") from exc


__all__ = [
    "FormatError",
    "family_to_text",
    "parse_family_file",
    "parse_family_text",
    "parse_matrix",
    "parse_parameter",
    "parse_point",
    "parse_point_file",
    "parse_point_q",
    "parse_point_qt",
    "parse_weights",
]
