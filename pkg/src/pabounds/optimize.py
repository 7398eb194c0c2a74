"""Scalar maximization: coarse grid scan followed by golden-section refinement."""

from __future__ import annotations

import math

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-8):
    """Golden-section search for the maximum of f on [lo, hi].

    Returns (x_best, f_best) over every point actually evaluated, endpoints
    included, so boundary maxima are handled.  Ties go to the smaller x.
    """
    best_x, best_f = lo, f(lo)
    f_hi = f(hi)
    if f_hi > best_f:
        best_x, best_f = hi, f_hi
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
            x, fx = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
            x, fx = d, fd
        if fx > best_f or (fx == best_f and x < best_x):
            best_x, best_f = x, fx
    return best_x, best_f


def grid_golden_max(f, lo: float, hi: float, grid_points: int = 64, tol: float = 1e-8):
    """Evaluate f on an even grid, then golden-refine around the best point.

    The grid-first pass guards against non-concave objectives; refinement
    runs on the bracket spanned by the grid neighbors of the best sample.
    """
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    step = (hi - lo) / (grid_points - 1)
    best_i, best_x, best_f = 0, lo, f(lo)
    for i in range(1, grid_points):
        x = lo + i * step
        fx = f(x)
        if fx > best_f:
            best_i, best_x, best_f = i, x, fx
    a = lo + max(best_i - 1, 0) * step
    b = lo + min(best_i + 1, grid_points - 1) * step
    x_ref, f_ref = golden_section_max(f, a, b, tol=tol)
    if f_ref > best_f or (f_ref == best_f and x_ref < best_x):
        return x_ref, f_ref
    return best_x, best_f
