"""Parity-resolved spectral G-function of the quantum Rabi model.

Working in omega = 1 units (the `ModelParams` conversion happens at the call
boundary), each parity sector p = +/-1 has a transcendental function

    G_p(x) = sum_{n>=0} T_n(x) * (1 - p*delta/(x - n))

whose zeros in the scaled coordinate x are exactly the regular eigenvalues of
that sector, and whose simple poles sit at the baseline integers x = n.  The
weights T_n are the g^n-rescaled expansion coefficients of the sector
wavefunction around its outer regular singular point; they obey the
three-term recurrence

    T_0 = 1,
    (n+1) T_{n+1} = [2 g^2 + (n - x + delta^2/(x - n)) / 2] T_n - g^2 T_{n-1}.

The g^n rescaling is folded into the recurrence so that no intermediate
quantity overflows at small coupling; term magnitudes decay geometrically at
asymptotic ratio 1/2 independent of g.

Evaluation near the poles is done by exact algebraic separation: every T_n(x)
is linear in 1/(x - m) for the single baseline m crossed by the recurrence, so
G_p(x) = P(x)/(x - m) + Q(x) with both accumulators pole-free.  The residue
and finite part *at* x = m follow from the same bookkeeping plus first-order
coefficient derivatives; no numerical limiting is involved.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence, PoleProximity, ZeroCoupling
from .model import ModelParams, Parity

# Direct evaluation refuses queries closer than this to an integer; the
# cancellation in the parity bracket grows like 1/pole_distance.
POLE_GUARD = 1e-6

DEFAULT_EPS = 1e-13
DEFAULT_N_MAX = 2000

# Adaptive stop: this many consecutive terms below eps * |partial sum|.
# Term size is not monotone early on, so a single small term is not trusted.
_WINDOW = 5

_MACHINE_EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class SeriesCoefficients:
    """Rescaled expansion weights T_n at a fixed spectral coordinate.

    coeffs[0] is the unit recurrence seed.  `converged` means the last
    `_WINDOW` retained coefficients each satisfied |T_n| < eps * |sum T|;
    `tail_estimate` bounds the magnitude of the neglected tail.
    """

    x: float
    coeffs: np.ndarray
    n_used: int
    converged: bool
    tail_estimate: float

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))


@dataclass(frozen=True)
class GValue:
    """One evaluation of G_p with truncation and rounding metadata."""

    x: float
    parity: Parity
    value: float
    n_used: int
    error_estimate: float
    pole_distance: float


@dataclass(frozen=True)
class RegularizedG:
    """Laurent data of G_p at a baseline: G_p(n + h) ~ residue/h + finite_part.

    `residue_scale` is the gross magnitude (sum of |contributions|) behind the
    residue accumulator; it sets the natural scale for deciding whether a
    residue is "small".
    """

    n: int
    parity: Parity
    residue: float
    finite_part: float
    n_used: int
    residue_scale: float


@dataclass(frozen=True)
class SplitGValue:
    """Exact pole/regular split of G_p at x near (but not at) baseline m:
    value == regular_part + pole_coeff / (x - m), each part cancellation-free.
    """

    x: float
    parity: Parity
    baseline: int
    pole_coeff: float
    regular_part: float
    value: float
    n_used: int


def pole_distance(x: float) -> float:
    """Distance from x to the nearest integer (the pole guard metric)."""
    return abs(x - round(x))


def _reduced_or_raise(params: ModelParams) -> tuple[float, float]:
    g_r, delta_r = params.reduced()
    if g_r == 0.0:
        raise ZeroCoupling("g == 0: use the oracle's closed-form path")
    return g_r, delta_r


def _check_guard(x: float, guard: float = POLE_GUARD) -> float:
    dist = pole_distance(x)
    if dist < guard:
        raise PoleProximity(x, round(x))
    return dist


def _series_sum_scalar(
    x: float, g_r: float, delta_r: float, psign: int | None, eps: float, n_max: int
) -> tuple[float, float, float, int, bool]:
    """Sum the series at one x with compensated accumulation.

    psign in {+1, -1} applies the parity bracket; None sums bare coefficients
    (used for the coefficient container, where the bracket is irrelevant).

    Returns (value, abs_sum, tail_estimate, n_used, converged).
    """
    g2 = g_r * g_r
    d2 = delta_r * delta_r
    t_prev = 0.0
    t_cur = 1.0
    total = 0.0
    comp = 0.0  # Kahan compensation
    abs_sum = 0.0
    streak = 0
    term = 1.0
    n = 0
    while n < n_max:
        xn = x - n
        if psign is None:
            term = t_cur
        elif delta_r == 0.0:
            term = t_cur
        else:
            term = t_cur * (1.0 - psign * delta_r / xn)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        abs_sum += abs(term)
        if abs(term) < eps * abs(total):
            streak += 1
            if streak >= _WINDOW:
                return total, abs_sum, 4.0 * abs(term), n, True
        else:
            streak = 0
        if delta_r == 0.0:
            gfn = 2.0 * g2 + 0.5 * (n - x)
        else:
            gfn = 2.0 * g2 + 0.5 * (n - x + d2 / xn)
        t_prev, t_cur = t_cur, (gfn * t_cur - g2 * t_prev) / (n + 1.0)
        n += 1
    return total, abs_sum, 4.0 * abs(term), n_max - 1, False


def _series_sum_grid(
    xs: np.ndarray, g_r: float, delta_r: float, psign: int, eps: float, n_max: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized version of `_series_sum_scalar` over an array of x values.

    Same recurrence and stopping rule applied elementwise; an element's
    accumulators freeze once its own tail criterion is met.

    Returns (values, abs_sums, tails, n_used); raises NonConvergence if any
    element is still active at the cap.
    """
    xs = np.asarray(xs, dtype=float)
    g2 = g_r * g_r
    d2 = delta_r * delta_r
    t_prev = np.zeros_like(xs)
    t_cur = np.ones_like(xs)
    total = np.zeros_like(xs)
    comp = np.zeros_like(xs)
    abs_sum = np.zeros_like(xs)
    tail = np.zeros_like(xs)
    streak = np.zeros(xs.shape, dtype=np.int64)
    n_used = np.zeros(xs.shape, dtype=np.int64)
    active = np.ones(xs.shape, dtype=bool)
    n = 0
    while n < n_max and active.any():
        xn = xs - n
        if delta_r == 0.0:
            term = t_cur.copy()
        else:
            term = t_cur * (1.0 - psign * delta_r / xn)
        y = term - comp
        t = total + y
        comp = np.where(active, (t - total) - y, comp)
        total = np.where(active, t, total)
        abs_sum = np.where(active, abs_sum + np.abs(term), abs_sum)
        small = np.abs(term) < eps * np.abs(total)
        streak = np.where(active, np.where(small, streak + 1, 0), streak)
        n_used = np.where(active, n, n_used)
        tail = np.where(active, 4.0 * np.abs(term), tail)
        active = active & (streak < _WINDOW)
        if delta_r == 0.0:
            gfn = 2.0 * g2 + 0.5 * (n - xs)
        else:
            gfn = 2.0 * g2 + 0.5 * (n - xs + d2 / xn)
        t_prev, t_cur = t_cur, (gfn * t_cur - g2 * t_prev) / (n + 1.0)
        n += 1
    if active.any():
        raise NonConvergence(n_max, f"{int(active.sum())} grid points unconverged")
    return total, abs_sum, tail, n_used


def recurrence_coeffs(
    x: float,
    params: ModelParams,
    eps: float = DEFAULT_EPS,
    n_max: int = DEFAULT_N_MAX,
) -> SeriesCoefficients:
    """Compute T_0..T_N by the three-term recurrence with the adaptive stop.

    x exactly on a non-negative integer has poles in the recurrence unless
    delta == 0; such queries must go through `g_eval_regularized`.
    """
    g_r, delta_r = _reduced_or_raise(params)
    if delta_r != 0.0 and x == round(x) and x >= 0:
        raise PoleProximity(x, round(x))
    g2 = g_r * g_r
    d2 = delta_r * delta_r
    coeffs = [1.0]
    total = 0.0
    comp = 0.0
    streak = 0
    converged = False
    tail = 0.0
    t_prev, t_cur = 0.0, 1.0
    n = 0
    while n < n_max:
        term = t_cur
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        tail = 4.0 * abs(term)
        if abs(term) < eps * abs(total):
            streak += 1
            if streak >= _WINDOW:
                converged = True
                break
        else:
            streak = 0
        if delta_r == 0.0:
            gfn = 2.0 * g2 + 0.5 * (n - x)
        else:
            gfn = 2.0 * g2 + 0.5 * (n - x + d2 / (x - n))
        t_prev, t_cur = t_cur, (gfn * t_cur - g2 * t_prev) / (n + 1.0)
        coeffs.append(t_cur)
        n += 1
    if not converged:
        raise NonConvergence(n_max, f"coefficients at x={x}")
    return SeriesCoefficients(
        x=x,
        coeffs=np.array(coeffs[: n + 1]),
        n_used=n,
        converged=converged,
        tail_estimate=tail,
    )


def g_eval(
    parity: Parity,
    x: float,
    params: ModelParams,
    eps: float = DEFAULT_EPS,
    n_max: int = DEFAULT_N_MAX,
) -> GValue:
    """Evaluate G_p(x) directly (plain truncated summation).

    Refuses x within `POLE_GUARD` of an integer; the error estimate combines
    the series tail with an accumulated-rounding bound that grows with the
    bracket amplification near poles.
    """
    g_r, delta_r = _reduced_or_raise(params)
    dist = _check_guard(x)
    value, abs_sum, tail, n_used, converged = _series_sum_scalar(
        x, g_r, delta_r, parity.sign, eps, n_max
    )
    if not converged:
        raise NonConvergence(n_max, f"G at x={x}")
    error = tail + 8.0 * _MACHINE_EPS * abs_sum
    return GValue(
        x=x,
        parity=parity,
        value=value,
        n_used=n_used,
        error_estimate=error,
        pole_distance=dist,
    )


def g_eval_grid(
    parity: Parity,
    xs: np.ndarray,
    params: ModelParams,
    eps: float = DEFAULT_EPS,
    n_max: int = DEFAULT_N_MAX,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized direct evaluation over many x at once.

    Returns (values, error_estimates, n_used).  The whole grid must respect
    the pole guard.
    """
    g_r, delta_r = _reduced_or_raise(params)
    xs = np.asarray(xs, dtype=float)
    dist = np.abs(xs - np.round(xs))
    if dist.size and dist.min() < POLE_GUARD:
        bad = float(xs[np.argmin(dist)])
        raise PoleProximity(bad, round(bad))
    values, abs_sums, tails, n_used = _series_sum_grid(
        xs, g_r, delta_r, parity.sign, eps, n_max
    )
    errors = tails + 8.0 * _MACHINE_EPS * abs_sums
    return values, errors, n_used


def g_eval_regularized(
    n: int,
    parity: Parity,
    params: ModelParams,
    eps: float = DEFAULT_EPS,
    n_max: int = DEFAULT_N_MAX,
) -> RegularizedG:
    """Residue and finite part of G_p at the baseline x = n.

    Writes each coefficient as T_k(x) = A_k + B_k/(x-n) + C_k (x-n) + ...
    near the baseline.  Only the single recurrence step k = n injects the
    pole, so B_k = 0 for k <= n, and the step needs the coefficient
    derivative C_n; everything downstream is a linear two-track recurrence.
    Summation of the bracketed series then yields the exact Laurent data.
    """
    if n < 0:
        raise ValueError(f"baseline index must be >= 0, got {n}")
    g_r, delta_r = _reduced_or_raise(params)
    if delta_r == 0.0:
        # G has no poles at all: residue vanishes identically and the finite
        # part is the plain series value at the integer.
        value, _, _, n_used, conv = _series_sum_scalar(
            float(n), g_r, 0.0, parity.sign, eps, n_max
        )
        if not conv:
            raise NonConvergence(n_max, f"regularized G at baseline {n}")
        return RegularizedG(
            n=n,
            parity=parity,
            residue=0.0,
            finite_part=value,
            n_used=n_used,
            residue_scale=0.0,
        )
    psign = parity.sign
    g2 = g_r * g_r
    d2 = delta_r * delta_r
    phi = 0.5 * d2  # pole coefficient of the rescaled recurrence factor at k=n

    # Phase 1: k = 0..n, values A_k = T_k(n) and derivatives C_k = T_k'(n).
    A = [1.0]
    C = [0.0]
    for k in range(n):
        gfk = 2.0 * g2 + 0.5 * (k - n + d2 / (n - k))
        dgfk = -0.5 - 0.5 * d2 / ((n - k) * (n - k))
        a_m1 = A[k - 1] if k >= 1 else 0.0
        c_m1 = C[k - 1] if k >= 1 else 0.0
        A.append((gfk * A[k] - g2 * a_m1) / (k + 1.0))
        C.append((dgfk * A[k] + gfk * C[k] - g2 * c_m1) / (k + 1.0))

    # Bracketed sums.  Residue gets the bracket pole at k=n and every B_k
    # beyond; the finite part needs A_k everywhere plus the first-order
    # cross terms at k = n (coefficient derivative) and k > n (bracket
    # derivative against B_k).
    res = 0.0
    res_c = 0.0
    fin = 0.0
    fin_c = 0.0
    abs_res = 0.0

    def _add_res(v: float):
        nonlocal res, res_c, abs_res
        y = v - res_c
        t = res + y
        res_c = (t - res) - y
        res = t
        abs_res += abs(v)

    def _add_fin(v: float):
        nonlocal fin, fin_c
        y = v - fin_c
        t = fin + y
        fin_c = (t - fin) - y
        fin = t

    for k in range(n):
        _add_fin(A[k] * (1.0 - psign * delta_r / (n - k)))
    _add_res(-psign * delta_r * A[n])
    _add_fin(A[n] - psign * delta_r * C[n])

    # Transition step k = n: rescaled factor = phi/h + 2g^2 - h/2.
    a_m1 = A[n - 1] if n >= 1 else 0.0
    b_cur = phi * A[n] / (n + 1.0)
    a_cur = (phi * C[n] + 2.0 * g2 * A[n] - g2 * a_m1) / (n + 1.0)
    b_prev, a_prev = 0.0, A[n]

    k = n + 1
    streak = 0
    converged = False
    while k < n_max:
        br = 1.0 - psign * delta_r / (n - k)
        dbr = psign * delta_r / ((n - k) * (n - k))
        term_r = b_cur * br
        term_f = a_cur * br + b_cur * dbr
        _add_res(term_r)
        _add_fin(term_f)
        if abs(term_r) <= eps * max(1.0, abs(res)) and abs(term_f) <= eps * max(
            1.0, abs(fin)
        ):
            streak += 1
            if streak >= _WINDOW:
                converged = True
                break
        else:
            streak = 0
        gfk = 2.0 * g2 + 0.5 * (k - n + d2 / (n - k))
        dgfk = -0.5 - 0.5 * d2 / ((n - k) * (n - k))
        b_next = (gfk * b_cur - g2 * b_prev) / (k + 1.0)
        a_next = (gfk * a_cur + dgfk * b_cur - g2 * a_prev) / (k + 1.0)
        b_prev, b_cur = b_cur, b_next
        a_prev, a_cur = a_cur, a_next
        k += 1
    if not converged:
        raise NonConvergence(n_max, f"regularized G at baseline {n}")
    return RegularizedG(
        n=n,
        parity=parity,
        residue=res,
        finite_part=fin,
        n_used=k,
        residue_scale=abs_res,
    )


def g_eval_split(
    parity: Parity,
    x: float,
    params: ModelParams,
    eps: float = DEFAULT_EPS,
    n_max: int = DEFAULT_N_MAX,
) -> SplitGValue:
    """Evaluate G_p(x) with the nearest-baseline pole separated exactly.

    For m = round(x) >= 0 every T_k(x) is exactly linear in 1/(x-m), so both
    accumulators are free of the pole cancellation and the reconstruction
    regular_part + pole_coeff/(x-m) is accurate arbitrarily close to the
    baseline (x itself must not be the exact integer).
    """
    g_r, delta_r = _reduced_or_raise(params)
    m = round(x)
    if m < 0:  # no pole nearby; plain evaluation already cancellation-free
        gv = g_eval(parity, x, params, eps=eps, n_max=n_max)
        return SplitGValue(
            x=x,
            parity=parity,
            baseline=m,
            pole_coeff=0.0,
            regular_part=gv.value,
            value=gv.value,
            n_used=gv.n_used,
        )
    xi = x - m
    if xi == 0.0:
        raise PoleProximity(x, m)
    psign = parity.sign
    g2 = g_r * g_r
    d2 = delta_r * delta_r
    phi = 0.5 * d2

    a_prev, a_cur = 0.0, 1.0  # regular track of T_k
    b_prev, b_cur = 0.0, 0.0  # pole track of T_k
    pole = 0.0
    reg = 0.0
    pole_c = 0.0
    reg_c = 0.0
    streak = 0
    converged = False
    k = 0
    while k < n_max:
        if k == m:
            term_q = a_cur
            term_p = -psign * delta_r * a_cur
        else:
            br = 1.0 - psign * delta_r / (x - k) if delta_r != 0.0 else 1.0
            term_q = a_cur * br
            term_p = b_cur * br
        y = term_q - reg_c
        t = reg + y
        reg_c = (t - reg) - y
        reg = t
        y = term_p - pole_c
        t = pole + y
        pole_c = (t - pole) - y
        pole = t
        if abs(term_q) <= eps * max(1.0, abs(reg)) and abs(term_p) <= eps * max(
            1.0, abs(pole)
        ):
            streak += 1
            if streak >= _WINDOW:
                converged = True
                break
        else:
            streak = 0
        if k == m:
            gf_reg = 2.0 * g2 - 0.5 * xi
            a_next = (gf_reg * a_cur - g2 * a_prev) / (k + 1.0)
            b_next = (phi * a_cur + gf_reg * b_cur - g2 * b_prev) / (k + 1.0)
        else:
            gfk = 2.0 * g2 + 0.5 * (k - x + (d2 / (x - k) if delta_r != 0.0 else 0.0))
            a_next = (gfk * a_cur - g2 * a_prev) / (k + 1.0)
            b_next = (gfk * b_cur - g2 * b_prev) / (k + 1.0)
        a_prev, a_cur = a_cur, a_next
        b_prev, b_cur = b_cur, b_next
        k += 1
    if not converged:
        raise NonConvergence(n_max, f"split G at x={x}")
    return SplitGValue(
        x=x,
        parity=parity,
        baseline=m,
        pole_coeff=pole,
        regular_part=reg,
        value=reg + pole / xi,
        n_used=k,
    )


def central_difference(f, x: float, h: float) -> float:
    """Plain symmetric difference quotient; shared by the derivative helper
    and its self-tests."""
    return (f(x + h) - f(x - h)) / (2.0 * h)


def g_derivative(
    parity: Parity,
    x: float,
    params: ModelParams,
    eps: float = DEFAULT_EPS,
) -> float:
    """Finite-difference dG/dx, for root-multiplicity heuristics only.

    Never used for root acceptance; the guard is widened by the step so both
    stencil points stay clear of the poles.
    """
    h = max(1e-6, 1e-6 * abs(x))
    for probe in (x - h, x, x + h):
        dist = pole_distance(probe)
        if dist < POLE_GUARD:
            raise PoleProximity(probe, round(probe))
    return central_difference(
        lambda t: g_eval(parity, t, params, eps=eps).value, x, h
    )
