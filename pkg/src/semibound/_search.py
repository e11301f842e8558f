"""Deterministic one-dimensional minimisation helpers.

Coarse grid scan followed by golden-section refinement; ties are broken
toward the smaller argument so repeated runs produce identical curves.
"""

from __future__ import annotations

import math
from typing import Callable

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 0.618...


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   rel_tol: float = 1e-8, max_iter: int = 200) -> tuple[float, float]:
    """Minimise ``f`` on [lo, hi]; returns (argmin, value).

    Assumes unimodality on the bracket; on plateaus the left-most point of
    the final bracket wins.
    """
    a, b = float(lo), float(hi)
    if not b > a:
        raise ValueError(f"empty bracket [{lo}, {hi}]")
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    scale = max(abs(a), abs(b), 1e-30)
    for _ in range(max_iter):
        if (b - a) <= rel_tol * scale:
            break
        if fc <= fd:  # <= keeps ties drifting left
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = c if fc <= fd else d
    return (x, fc if fc <= fd else fd)


def grid_then_golden(f: Callable[[float], float], lo: float, hi: float,
                     n_grid: int = 256, rel_tol: float = 1e-8) -> tuple[float, float]:
    """Scan ``n_grid`` interior points, then golden-section the best cell."""
    lo, hi = float(lo), float(hi)
    if not hi > lo:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    xs = [lo + (hi - lo) * (k + 1) / (n_grid + 1) for k in range(n_grid)]
    vals = [f(x) for x in xs]
    best = min(range(n_grid), key=lambda k: (vals[k], xs[k]))
    left = xs[best - 1] if best > 0 else lo
    right = xs[best + 1] if best < n_grid - 1 else hi
    x, v = golden_section(f, left, right, rel_tol=rel_tol)
    if vals[best] < v:
        return xs[best], vals[best]
    return x, v
