"""``ht``: command-line front end.

Exit status is 0 on success, 1 on a mathematical domain error (bad
reduction, not a morphism, vanishing generic height, ...) and 2 on usage or
input-format errors.  Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .canonical import (
    CSV_COLUMNS,
    envelope,
    exponent_fit,
    fiber_canonical_height,
    generic_canonical_height,
    is_preperiodic,
    preperiodic_parameter_search,
    row_fields,
    variation_sweep,
    SweepRow,
)
from .dynamics import (
    constants_bundle,
    family_heights,
    specialize_morphism,
)
from .exact import DomainError, RealInterval, set_working_precision
from .exact.interval import MIN_PRECISION
from .formats import (
    FormatError,
    parse_family_file,
    parse_matrix,
    parse_parameter,
    parse_point,
    parse_weights,
)
from .heights_q import weil_height
from .heights_qt import arith_height, geom_height, specialization_bounds, specialize, total_height
from .multibundle import (
    ProductFamily,
    eigen_bundle,
    product_variation_sweep,
    spectral_radius,
    variation_exponent_bound,
    weight_label,
)

log = logging.getLogger("varheight")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class JobSpec:
    command: str
    tol: Fraction
    cap: Optional[int]
    eps: Fraction
    precision: int
    threads: int
    output: str

    def __post_init__(self):
        if self.tol <= 0:
            raise UsageError("tolerance must be positive")
        if self.cap is not None and self.cap < 1:
            raise UsageError("cap H must be >= 1")
        if self.precision < MIN_PRECISION:
            raise UsageError(f"precision must be at least {MIN_PRECISION} bits")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _default_precision() -> int:
    env = os.environ.get("HT_PRECISION_BITS")
    return int(env) if env and env.isdigit() else 128


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None, help="working precision in bits (>= 64)")
    common.add_argument("--tol", type=_fraction, default=Fraction(1, 10**6), help="interval width target")
    common.add_argument("--threads", type=int, default=None, help="worker processes (default: CPU count)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="ht", description="Certified heights in families of dynamical systems.")
    p.add_argument("--version", action="version", version=f"ht {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    s = sub.add_parser("point", parents=[common], help="normalize a point over Q and print its height")
    s.add_argument("--point", required=True, help='e.g. "1:2:3" or "3/2"; @file for a point file')

    s = sub.add_parser("ffpoint", parents=[common], help="heights of a point over Q(t)")
    s.add_argument("--point", required=True, help='e.g. "t^2+1 : t"')
    s.add_argument("--t", help="also specialize at this parameter")

    s = sub.add_parser("constants", parents=[common], help="explicit constants of a family")
    s.add_argument("--family", required=True)
    s.add_argument("--point", help="include the point-dependent constants")

    s = sub.add_parser("canonical", parents=[common], help="certified canonical height")
    mode = s.add_mutually_exclusive_group(required=True)
    mode.add_argument("--fiber", action="store_true")
    mode.add_argument("--generic", action="store_true")
    s.add_argument("--family", required=True)
    s.add_argument("--point", required=True)
    s.add_argument("--t", help="parameter (required with --fiber)")
    s.add_argument("--closed-form-bound", action="store_true", help="use only the closed-form one-step bound")

    s = sub.add_parser("preper", parents=[common], help="decide preperiodicity on one fiber")
    s.add_argument("--family", required=True)
    s.add_argument("--point", required=True)
    s.add_argument("--t", required=True)
    s.add_argument("--per-map", action="store_true", help="use the sharper per-map escape threshold")

    s = sub.add_parser("preper-search", parents=[common], help="parameters where the point is preperiodic")
    s.add_argument("--family", required=True)
    s.add_argument("--point", required=True)
    s.add_argument("--cap", type=int, required=True, help="bound H on max(|p|, q)")
    s.add_argument("--per-map", action="store_true")

    s = sub.add_parser("sweep", parents=[common], help="variation experiment as CSV")
    s.add_argument("--family", required=True, action="append", help="repeat for a product family")
    s.add_argument("--point", required=True, action="append")
    s.add_argument("--weights", help="comma-separated x for product families")
    s.add_argument("--cap", type=int, required=True)
    s.add_argument("--min-height", type=float, default=0.0)
    s.add_argument("--out", help="CSV path (default stdout)")
    s.add_argument("--check-envelope", action="store_true", help="report rows outside the error envelope")

    s = sub.add_parser("spectral", parents=[common], help="spectral radius and eigen-bundle of a Picard action")
    s.add_argument("--matrix", required=True, help='row-major, e.g. "15,-4;4,-1"')
    s.add_argument("--eps", type=_fraction, default=Fraction(0))

    s = sub.add_parser("exponent-fit", parents=[common], help="fit the error exponent of a sweep CSV")
    s.add_argument("--csv", required=True)
    return p


def _out(line: str = "") -> None:
    sys.stdout.write(line + "\n")


def _iv(x: RealInterval) -> str:
    return x.render()


def _t_str(t) -> str:
    return "inf" if t is None else str(t)


def cmd_point(args) -> None:
    P = parse_point(args.point, over_qt=False)
    _out(f"point  {P}")
    _out(f"h      {_iv(weil_height(P))}")


def cmd_ffpoint(args) -> None:
    P = parse_point(args.point)
    _out(f"point   {P}")
    _out(f"h_geom  {geom_height(P)}")
    _out(f"h_arith {_iv(arith_height(P))}")
    _out(f"h_total {_iv(total_height(P))}")
    b = specialization_bounds(P)
    if b.degenerate:
        _out(f"h(P_t) = {_iv(b.exact_height)} for every t")
    else:
        _out(f"h_geom(P) h(t) - h(P_t) in [{b.lower.render()}, {b.upper.render()}]")
    if args.t is not None:
        t = parse_parameter(args.t)
        Pt = specialize(P, t)
        _out(f"P_t     {Pt}  (t = {_t_str(t)})")
        _out(f"h(P_t)  {_iv(weil_height(Pt))}")


def cmd_constants(args) -> None:
    f = parse_family_file(args.family)
    P = parse_point(args.point) if args.point else None
    hg, ha, ht = family_heights(f)
    _out(f"family  N={f.N} d={f.d}  a(t) = {f.resultant}")
    _out(f"h_geom(f) {hg}  h_arith(f) {_iv(ha)}  h_total(f) {_iv(ht)}")
    for name, val in constants_bundle(f, P).items():
        if val is None:
            continue
        _out(f"{name:<18}{val if isinstance(val, int) else _iv(val)}")


def cmd_canonical(args) -> None:
    f = parse_family_file(args.family)
    P = parse_point(args.point)
    per_map = not args.closed_form_bound
    if args.fiber:
        if args.t is None:
            raise UsageError("--fiber needs --t")
        t = parse_parameter(args.t)
        ft = specialize_morphism(f, t)
        res = fiber_canonical_height(ft, specialize(P, t), args.tol, per_map=per_map)
        _out(f"fiber t = {_t_str(t)}  map {ft}  point {specialize(P, t)}")
    else:
        res = generic_canonical_height(f, P, args.tol, per_map=per_map)
        _out(f"generic  point {P}")
    _out(f"h_hat  {_iv(res.value)}")
    _out(f"k {res.k}  one-step bound {_iv(res.bound)} ({res.bound_source})")


def cmd_preper(args) -> None:
    f = parse_family_file(args.family)
    P = parse_point(args.point)
    t = parse_parameter(args.t)
    ft = specialize_morphism(f, t)
    cert = is_preperiodic(ft, specialize(P, t), per_map=args.per_map)
    if cert.preperiodic:
        _out(f"preperiodic: yes  (Q_{cert.cycle_start} = Q_{cert.cycle_start + cert.cycle_length})")
    else:
        _out(f"preperiodic: no  (h(Q_{cert.escape_index}) exceeds {_iv(cert.threshold)})")


def cmd_preper_search(args) -> None:
    f = parse_family_file(args.family)
    P = parse_point(args.point)
    res = preperiodic_parameter_search(f, P, args.cap, per_map=args.per_map, workers=args.threads)
    _out(f"generic h_hat {_iv(res.hhat)}")
    _out(f"preperiodic parameters with max(|p|, q) <= {res.cap}:")
    for t, _ in res.preperiodic:
        _out(f"  {_t_str(t)}")
    if res.undecided:
        _out("undecided at bad reduction: " + ", ".join(_t_str(t) for t in res.undecided))
    _out(f"height bound on all preperiodic parameters: h(t) <= {_iv(res.bound)}")
    _out(f"searched only up to height log {res.cap}; no completeness claim beyond the cap")


def cmd_sweep(args) -> None:
    fams = [parse_family_file(p) for p in args.family]
    pts = [parse_point(p) for p in args.point]
    if len(fams) != len(pts):
        raise UsageError("give one --point per --family")
    if len(fams) == 1 and args.weights is None:
        res = variation_sweep(fams[0], pts[0], args.cap, args.tol, args.min_height, args.threads)
        label = None
    else:
        weights = parse_weights(args.weights) if args.weights else [Fraction(1)] * len(fams)
        res = product_variation_sweep(ProductFamily(fams), pts, weights, args.cap, args.tol, args.min_height, args.threads)
        label = weight_label(weights)
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow((["x"] if label is not None else []) + CSV_COLUMNS)
        for row in res.rows:
            w.writerow(([label] if label is not None else []) + row_fields(row))
    finally:
        if args.out:
            fh.close()
    sys.stderr.write(f"{len(res.rows)} rows, {len(res.skipped)} bad-reduction parameters skipped\n")
    if args.check_envelope and len(fams) == 1:
        outside = 0
        for row in res.rows:
            if row.h_t.lo_float >= 1 and not row.error.abs().certainly_le(envelope(fams[0], pts[0], row.h_t).lo_fraction()):
                outside += 1
        sys.stderr.write(f"{outside} rows with h(t) >= 1 outside the error envelope\n")


def cmd_spectral(args) -> None:
    A = parse_matrix(args.matrix)
    rho = spectral_radius(A)
    _out(f"rho    {_iv(rho)}")
    eb = eigen_bundle(A)
    _out(f"alpha  {_iv(eb.alpha)}")
    _out("x      (" + ", ".join(_iv(v) for v in eb.x) + ")")
    _out(f"exponent bound {_iv(variation_exponent_bound(eb.alpha, rho, args.eps))}")
    if eb.hypotheses_assumed:
        _out("hypotheses assumed: generation by semi-ample bundles is not checked for non-diagonal actions")


def _read_rows(path: str) -> list[SweepRow]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_COLUMNS) - set(reader.fieldnames or [])
        if missing:
            raise FormatError(f"{path}: missing columns {sorted(missing)}")
        for rec in reader:
            def iv(name):
                return RealInterval.hull(
                    RealInterval.exact(Fraction(rec[name + "_lo"])), RealInterval.exact(Fraction(rec[name + "_hi"]))
                )

            den = int(rec["t_den"])
            t = None if den == 0 else Fraction(int(rec["t_num"]), den)
            rows.append(SweepRow(t, iv("h_t"), iv("hhat"), iv("pred"), iv("err")))
    return rows


def cmd_exponent_fit(args) -> None:
    fit = exponent_fit(_read_rows(args.csv))
    _out(f"slope {fit.slope:.6f}  intercept {fit.intercept:.6f}  rows {fit.count}")


COMMANDS = {
    "point": cmd_point,
    "ffpoint": cmd_ffpoint,
    "constants": cmd_constants,
    "canonical": cmd_canonical,
    "preper": cmd_preper,
    "preper-search": cmd_preper_search,
    "sweep": cmd_sweep,
    "spectral": cmd_spectral,
    "exponent-fit": cmd_exponent_fit,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        spec = JobSpec(
            args.command,
            args.tol,
            getattr(args, "cap", None),
            getattr(args, "eps", Fraction(0)),
            args.precision if args.precision is not None else _default_precision(),
            args.threads or os.cpu_count() or 1,
            "csv" if args.command == "sweep" else "text",
        )
        set_working_precision(spec.precision)
        COMMANDS[args.command](args)
    except (UsageError, FormatError) as exc:
        sys.stderr.write(f"ht {args.command}: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"ht {args.command}: {exc}\n")
        return 2
    except DomainError as exc:
        sys.stderr.write(f"ht {args.command}: {exc}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
