"""Explicit height-comparison constants for a family and a point.

All values are certified intervals evaluated from closed forms exactly as
stated; C3 is an exact integer.  Nothing here is sharpened.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..exact import RealInterval, max_interval
from ..exact.interval import log2_interval
from ..heights_qt import ProjPointQt, arith_height, geom_height
from .family import MorphismFamily, family_heights


def c3_value(N: int, d: int) -> int:
    return (N + 1) ** 2 * (N * (d - 1) + 1) ** N


def _log(x) -> RealInterval:
    return RealInterval.log_of(x)


def fiber_constants(f: MorphismFamily) -> tuple[RealInterval, RealInterval, int]:
    """``(C1, C2, C3)``: fiber heights satisfy ``|h - h_hat| <= C1 h(t) + C2``."""
    N, d = f.N, f.d
    hg, ha, _ = family_heights(f)
    C3 = c3_value(N, d)
    C1 = RealInterval.exact(C3 * hg) / (d - 1)
    C2 = (
        C3 * (ha + _log(hg + 1) + _log(C3)) / (d - 1)
        + (_log(N + 1) + N * _log(N * (d - 1) + 1)) / (d - 1)
    )
    return C1, C2, C3


def growth_constants(f: MorphismFamily, P: ProjPointQt) -> tuple[RealInterval, RealInterval, RealInterval]:
    """``(C4, C5, C6)`` bounding the heights of the iterates ``f^k(P)`` and the envelope term."""
    N, d = f.N, f.d
    hg_f, ha_f, _ = family_heights(f)
    hg_P, ha_P = geom_height(P), arith_height(P)
    log2 = log2_interval()
    C4 = RealInterval.exact(hg_P) + RealInterval.exact(hg_f) / (d - 1)
    C5 = (
        ha_P
        + hg_P * log2
        + ha_f / (d - 1)
        + log2 * hg_f / (d - 1)
        + N * _log(d + 1) / (d - 1)
        + RealInterval.exact(d) * _log(d) / ((d - 1) ** 2)
        + (d * log2 + d * C4.log_plus()) / (d - 1)
    )
    if C4.lo_fraction() > 0:
        log_dC4 = (C4 * d).log()
    else:
        # C4 = 0: the terms carrying a factor C4 vanish and log(d C4) is read as log+
        log_dC4 = RealInterval.exact(0)
    C6 = 4 * C4 * C5 + 4 * C4 * log_dC4 + 8 * C4 * log2 + log_dC4 + _log(N + 1)
    return C4, C5, C6


def corollary_constants(N: int, d: int) -> tuple[RealInterval, RealInterval, RealInterval, RealInterval]:
    """``(C7, C8, C9, C)`` depending only on ``N`` and ``d``."""
    C3 = c3_value(N, d)
    C7 = N * _log(d + 1) / (d - 1) + RealInterval.exact(d) * _log(d) / ((d - 1) ** 2)
    C8 = _log(N + 1) + N * _log(N * (d - 1) + 1)
    C9 = d * (2 * (2 * C3 + 2 * C3**2 + C8) / (d - 1) + 12 * d + 26 + 4 * C7 + _log(N + 1))
    C = max_interval(C9 * C9, C3 * _log(C3))
    return C7, C8, C9, C


def good_reduction_threshold(f: MorphismFamily) -> RealInterval:
    """``h(t)`` above this value forces ``a(t) != 0``."""
    hg, ha, _ = family_heights(f)
    C3 = c3_value(f.N, f.d)
    return C3 * (ha + hg * log2_interval() + _log(C3))


@dataclass(frozen=True)
class ConstantsBundle:
    C3: int
    C1: RealInterval
    C2: RealInterval
    C4: Optional[RealInterval]
    C5: Optional[RealInterval]
    C6: Optional[RealInterval]
    C7: RealInterval
    C8: RealInterval
    C9: RealInterval
    C: RealInterval
    goodred_threshold: RealInterval

    def items(self):
        for name in ("C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C", "goodred_threshold"):
            yield name, getattr(self, name)

    def envelope_factor(self, d: int) -> RealInterval:
        """``d (2 C1 + C2 + max(C5, C6))``, the coefficient of ``h(t)^(1/2)``."""
        if self.C5 is None or self.C6 is None:
            raise ValueError("envelope needs the point-dependent constants")
        return d * (2 * self.C1 + self.C2 + max_interval(self.C5, self.C6))


def constants_bundle(f: MorphismFamily, P: Optional[ProjPointQt] = None) -> ConstantsBundle:
    C1, C2, C3 = fiber_constants(f)
    C4 = C5 = C6 = None
    if P is not None:
        C4, C5, C6 = growth_constants(f, P)
    C7, C8, C9, C = corollary_constants(f.N, f.d)
    return ConstantsBundle(C3, C1, C2, C4, C5, C6, C7, C8, C9, C, good_reduction_threshold(f))
