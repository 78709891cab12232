"""Grid scans and bisection refinement for scalar root finding.

Zeros are located by bracketing strict sign changes on a uniform grid and
shrinking each bracket by bisection. Tangential zeros (touching without a
sign change) are not detected.
"""

from __future__ import annotations

from typing import Callable


def bisect_root(f: Callable[[float], float], lo: float, hi: float,
                flo: float, fhi: float, xtol: float = 1e-12) -> float:
    """Refine a bracketed sign change to ``|hi - lo| < xtol``."""
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise ValueError("bisect_root requires a sign change")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def find_zeros(f: Callable[[float], float], lo: float, hi: float,
               n: int = 2048, xtol: float = 1e-12,
               f_lo: float | None = None) -> list[float]:
    """All sign-change zeros of ``f`` on ``(lo, hi]`` via an ``n``-point scan."""
    zeros: list[float] = []
    x_prev = lo
    f_prev = f(lo) if f_lo is None else f_lo
    step = (hi - lo) / n
    for k in range(1, n + 1):
        x = lo + k * step if k < n else hi
        fx = f(x)
        if fx == 0.0:
            zeros.append(x)
        elif f_prev != 0.0 and (fx > 0.0) != (f_prev > 0.0):
            zeros.append(bisect_root(f, x_prev, x, f_prev, fx, xtol))
        x_prev, f_prev = x, fx
    return zeros


def expand_upper_bracket(f: Callable[[float], float], lo: float, flo: float,
                         factor: float = 2.0, limit: float = 1e12) -> tuple[float, float]:
    """Grow ``hi`` geometrically from ``lo`` until ``f`` changes sign."""
    hi = lo * factor if lo > 0 else 1.0
    while hi <= limit:
        fhi = f(hi)
        if (fhi > 0.0) != (flo > 0.0) or fhi == 0.0:
            return hi, fhi
        hi *= factor
    raise ValueError(f"no sign change found below {limit:g}")
