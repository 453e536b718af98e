"""Scan-and-bisect primitives shared by the census and constraint locators.

Bisection is the only refinement method used anywhere: the functions being
scanned can be stiff near poles of intermediate quantities, and bracketing is
unconditionally robust.  Near-tangent zeros (a dip of |f| below a threshold
without a sign change) are re-scanned once at higher density and otherwise
reported, never silently resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


@dataclass
class ScanResult:
    """Outcome of one uniform scan: refined roots plus unresolved dips."""

    grid: np.ndarray
    values: np.ndarray
    roots: list[float] = field(default_factory=list)
    tangential: list[float] = field(default_factory=list)


def sign_change_brackets(values: Sequence[float]) -> list[int]:
    """Indices i where values[i] and values[i+1] straddle zero."""
    v = np.asarray(values, dtype=float)
    out = []
    for i in range(v.size - 1):
        if v[i] == 0.0:
            continue  # node roots handled by the caller
        if v[i + 1] == 0.0:
            continue
        if (v[i] > 0.0) != (v[i + 1] > 0.0):
            out.append(i)
    return out


def bisect_root(
    f: Callable[[float], float],
    a: float,
    b: float,
    fa: float,
    fb: float,
    xtol: float,
    max_iter: int = 200,
) -> float:
    """Bisection on a bracketing interval; returns the bracket midpoint once
    its width drops below xtol."""
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise ValueError("bisect_root requires a sign change")
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (fa > 0.0):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    return 0.5 * (a + b)


def dip_candidates(values: Sequence[float], threshold: float) -> list[int]:
    """Interior indices where |f| dips below threshold without an adjacent
    sign change: the near-tangency suspects."""
    v = np.asarray(values, dtype=float)
    out = []
    for i in range(1, v.size - 1):
        if abs(v[i]) >= threshold:
            continue
        if abs(v[i]) > abs(v[i - 1]) or abs(v[i]) > abs(v[i + 1]):
            continue
        left_change = (v[i - 1] > 0.0) != (v[i] > 0.0) and v[i] != 0.0
        right_change = (v[i] > 0.0) != (v[i + 1] > 0.0) and v[i] != 0.0
        if not left_change and not right_change:
            out.append(i)
    return out


def scan_for_roots(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    points: int,
    xtol: float,
    tangency_factor: float = 1e-3,
    refine_density: int = 10,
    values: np.ndarray | None = None,
) -> ScanResult:
    """Uniform scan + bracket + bisect, with one round of 10x local re-scan
    around tangency suspects.

    `values` may carry precomputed f on the grid (it must match linspace(lo,
    hi, points)).  Roots landing exactly on grid nodes are accepted directly.
    """
    grid = np.linspace(lo, hi, points)
    if values is None:
        values = np.array([f(x) for x in grid])
    else:
        values = np.asarray(values, dtype=float)
    result = ScanResult(grid=grid, values=values)

    roots = [float(grid[i]) for i in range(points) if values[i] == 0.0]
    for i in sign_change_brackets(values):
        roots.append(
            bisect_root(f, float(grid[i]), float(grid[i + 1]),
                        float(values[i]), float(values[i + 1]), xtol)
        )

    finite = np.abs(values[np.isfinite(values)])
    scale = float(np.median(finite)) if finite.size else 0.0
    threshold = tangency_factor * scale
    for i in dip_candidates(values, threshold):
        a, b = float(grid[max(i - 1, 0)]), float(grid[min(i + 1, points - 1)])
        sub = np.linspace(a, b, 2 * refine_density + 1)
        sub_vals = np.array([f(x) for x in sub])
        sub_roots = [float(sub[j]) for j in range(sub.size) if sub_vals[j] == 0.0]
        for j in sign_change_brackets(sub_vals):
            sub_roots.append(
                bisect_root(f, float(sub[j]), float(sub[j + 1]),
                            float(sub_vals[j]), float(sub_vals[j + 1]), xtol)
            )
        if sub_roots:
            roots.extend(sub_roots)
        else:
            result.tangential.append(float(grid[i]))

    result.roots = sorted(set(_dedupe(roots, xtol)))
    return result


def _dedupe(roots: list[float], xtol: float) -> list[float]:
    """Merge refined roots closer than a couple of tolerance widths (the same
    zero found from both a bracket and a node hit)."""
    out: list[float] = []
    for r in sorted(roots):
        if out and abs(r - out[-1]) <= 4.0 * xtol:
            continue
        out.append(r)
    return out


def is_monotone_decreasing(values: Sequence[float]) -> bool:
    v = list(values)
    return all(b < a for a, b in zip(v, v[1:]))


def fit_exponential_decay(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares rate r of y ~ A * exp(-r * x); ys must be positive."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if np.any(ys <= 0.0):
        raise ValueError("exponential fit needs positive values")
    slope = np.polyfit(xs, np.log(ys), 1)[0]
    return float(-slope)


def ulp_scale(x: float) -> float:
    """Magnitude of one unit in the last place of x (1 ulp of max(|x|, 1))."""
    return math.ulp(max(abs(x), 1.0))
