"""Bracketing root finder and golden-section minimiser for smooth scalar functions."""

from __future__ import annotations

import math

import numpy as np

from .model import EDGE_EPS

SCAN_POINTS = 4096
BISECT_TOL = 1e-13
DEDUP_TOL = 1e-8
GOLDEN_TOL = 1e-12

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def opinion_grid(n: int = SCAN_POINTS) -> np.ndarray:
    return np.linspace(-1.0 + EDGE_EPS, 1.0 - EDGE_EPS, n)


def bisect(f, a: float, b: float, fa: float | None = None, tol: float = BISECT_TOL) -> float:
    """Bisection on a sign-change bracket ``[a, b]`` until ``b - a < tol``."""
    fa = f(a) if fa is None else fa
    if fa == 0.0:
        return a
    while b - a >= tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def dedupe(values, tol: float = DEDUP_TOL) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def scan_roots(f, grid: np.ndarray | None = None, tol: float = BISECT_TOL) -> list[float]:
    """All sign changes of ``f`` on ``grid``, each refined by bisection.

    ``f`` must accept both a float and the whole grid array. Roots with even
    multiplicity (tangencies) are not detected.
    """
    grid = opinion_grid() if grid is None else grid
    vals = np.asarray(f(grid), dtype=float)
    roots = [float(g) for g, v in zip(grid, vals) if v == 0.0]
    s = np.sign(vals)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    for i in idx:
        roots.append(bisect(f, float(grid[i]), float(grid[i + 1]), float(vals[i]), tol))
    return dedupe(roots)


def golden_section(f, a: float, b: float, tol: float = GOLDEN_TOL) -> float:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def grid_minimum(f, grid: np.ndarray | None = None, tol: float = GOLDEN_TOL) -> tuple[float, float]:
    """Global minimum of ``f`` on the grid, polished by golden section.

    Returns ``(x_min, f(x_min))``.
    """
    grid = opinion_grid() if grid is None else grid
    vals = np.asarray(f(grid), dtype=float)
    i = int(np.argmin(vals))
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, len(grid) - 1)])
    x = golden_section(f, lo, hi, tol)
    fx = f(x)
    if vals[i] < fx:
        return float(grid[i]), float(vals[i])
    return x, float(fx)
