"""Location and classification of exceptional (baseline) eigenvalues.

An eigenvalue sitting exactly on a baseline x = n comes in two kinds:

* Juddean: doubly degenerate, present in both parity sectors.  It occurs
  exactly when the n-th rescaled recurrence coefficient vanishes at its own
  baseline, T_n(x = n) = 0 - an algebraic condition in (g, delta), since
  every pole contribution of both G functions is proportional to T_n(n).
  T_n(n) is the determinant of the (n+1)x(n+1) tridiagonal truncation system
  evaluated by the stable linear three-term recurrence.

* non-Juddean: nondegenerate, present in one sector only.  As the coupling
  varies, a regular zero of G_p sits at x ~ n - residue/finite_part near the
  baseline, so it crosses the baseline exactly where the residue of G_p at
  x = n vanishes while T_n(n) does not - a transcendental condition.

Every candidate from either locator is accepted only after the truncated-Fock
oracle confirms the degeneracy pattern; acceptance is therefore proof against
any normalization slip in the condition functions themselves.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from .errors import DegenerateCase, ZeroCoupling
from .gfunction import g_eval_regularized
from .model import ModelParams, Parity, baseline_energy, validate
from .oracle import degeneracy_gap
from .rootscan import ScanResult, scan_for_roots

# Oracle acceptance thresholds, in units of omega.  Separated by decades from
# both solver noise (<= 1e-10) and typical level spacings (~ omega).
JUDD_GAP_TOL = 1e-8
NONJUDD_SAME_TOL = 1e-7
NONJUDD_OTHER_MIN = 1e-3

# |constraint| screening level below which a point is worth an oracle call.
SCREEN_TOL = 1e-6

# Accepted non-Juddean points closer than this (in g) to a Judd point of the
# same (n, delta) are discarded as contaminated.
DISJOINT_G_TOL = 1e-4

GRID_POINTS = 400
BISECT_G_TOL = 1e-10


@enum.unique
class Verdict(enum.Enum):
    NOT_EXCEPTIONAL = "not_exceptional"
    JUDDEAN = "juddean"
    NONJUDDEAN_PLUS = "nonjuddean_plus"
    NONJUDDEAN_MINUS = "nonjuddean_minus"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class JuddPoint:
    """A doubly degenerate baseline crossing at fixed delta."""

    n: int
    g_star: float
    delta: float
    residual: float
    oracle_gap: float


@dataclass(frozen=True)
class NonJuddeanPoint:
    """A one-parity baseline crossing at fixed delta."""

    n: int
    parity: Parity
    g_star: float
    delta: float
    condition_residual: float
    oracle_gap_same_parity: float
    oracle_gap_other_parity: float


@dataclass(frozen=True)
class ExceptionalClassification:
    """Verdict for one (n, params) point plus the numbers backing it."""

    n: int
    verdict: Verdict
    evidence: dict = field(default_factory=dict)


def judd_constraint(n: int, params: ModelParams) -> float:
    """Algebraic degeneracy constraint at baseline n, normalized.

    Returns delta * T_n(n) / sum_j |T_j(n)| in omega = 1 units: zero exactly
    at the Juddean couplings for delta > 0, identically zero in the globally
    degenerate delta = 0 limit, and continuous in g on g > 0.
    """
    if n < 0:
        raise ValueError(f"baseline index must be >= 0, got {n}")
    params = validate(params)
    g_r, delta_r = params.reduced()
    if g_r == 0.0:
        raise ZeroCoupling("judd_constraint needs g > 0")
    g2 = g_r * g_r
    d2 = delta_r * delta_r
    t_prev, t_cur = 0.0, 1.0
    norm = 1.0
    for j in range(n):
        gfj = 2.0 * g2 + 0.5 * (j - n + d2 / (n - j))
        t_prev, t_cur = t_cur, (gfj * t_cur - g2 * t_prev) / (j + 1.0)
        norm += abs(t_cur)
    return delta_r * t_cur / norm


def nonjuddean_condition(n: int, parity: Parity, params: ModelParams) -> float:
    """Transcendental one-parity condition at baseline n, normalized.

    The residue of G_p at x = n, divided by (1 + gross residue magnitude) so
    the value stays O(1) at strong coupling.  Zeros in g at fixed delta mark
    baseline crossings of sector p; delta = 0 is rejected because every
    baseline there is degenerate in both sectors rather than one.
    """
    if n < 0:
        raise ValueError(f"baseline index must be >= 0, got {n}")
    params = validate(params)
    if params.delta == 0.0:
        raise DegenerateCase(
            "delta == 0 is doubly degenerate at every baseline; "
            "the one-parity condition does not apply"
        )
    reg = g_eval_regularized(n, parity, params)
    return reg.residue / (1.0 + reg.residue_scale)


def _check_range(g_range: tuple[float, float]):
    lo, hi = g_range
    if not (0.0 < lo < hi) or not math.isfinite(hi):
        raise ValueError(f"g_range must satisfy 0 < lo < hi, got {g_range}")
    return float(lo), float(hi)


def scan_judd_constraint(
    n: int,
    delta: float,
    g_range: tuple[float, float],
    omega: float = 1.0,
    points: int = GRID_POINTS,
    tol: float = BISECT_G_TOL,
) -> ScanResult:
    """Uniform scan of the Juddean constraint over g; tangential dips are
    reported unresolved, never promoted to roots."""
    lo, hi = _check_range(g_range)

    def f(g: float) -> float:
        return judd_constraint(n, ModelParams(omega=omega, g=g, delta=delta))

    return scan_for_roots(f, lo, hi, points, tol)


def scan_nonjuddean_condition(
    n: int,
    parity: Parity,
    delta: float,
    g_range: tuple[float, float],
    omega: float = 1.0,
    points: int = GRID_POINTS,
    tol: float = BISECT_G_TOL,
) -> ScanResult:
    lo, hi = _check_range(g_range)

    def f(g: float) -> float:
        return nonjuddean_condition(
            n, parity, ModelParams(omega=omega, g=g, delta=delta)
        )

    return scan_for_roots(f, lo, hi, points, tol)


def find_judd_points(
    n: int,
    delta: float,
    g_range: tuple[float, float],
    tol: float = BISECT_G_TOL,
    omega: float = 1.0,
    points: int = GRID_POINTS,
) -> list[JuddPoint]:
    """All Juddean couplings for baseline n on the given g interval.

    Constraint zeros are refined by bisection to |dg| < tol and accepted only
    when the oracle confirms both parity gaps at the baseline energy; an
    empty list is a valid result.  delta = 0 is rejected: degeneracy is then
    global, not isolated.
    """
    if delta == 0.0:
        raise DegenerateCase("delta == 0 is degenerate at every baseline")
    scan = scan_judd_constraint(n, delta, g_range, omega=omega, points=points, tol=tol)
    accepted = []
    for g_star in scan.roots:
        params = validate(ModelParams(omega=omega, g=g_star, delta=delta))
        residual = abs(judd_constraint(n, params))
        gaps = degeneracy_gap(params, baseline_energy(n, params))
        if max(gaps.plus, gaps.minus) <= JUDD_GAP_TOL * omega:
            accepted.append(
                JuddPoint(
                    n=n,
                    g_star=g_star,
                    delta=delta,
                    residual=residual,
                    oracle_gap=max(gaps.plus, gaps.minus),
                )
            )
    return sorted(accepted, key=lambda p: p.g_star)


def find_nonjuddean_points(
    n: int,
    parity: Parity,
    delta: float,
    g_range: tuple[float, float],
    tol: float = BISECT_G_TOL,
    omega: float = 1.0,
    points: int = GRID_POINTS,
) -> list[NonJuddeanPoint]:
    """All one-parity baseline crossings of the given sector on the interval.

    Every candidate must pass the oracle pattern check (own-parity level on
    the baseline to NONJUDD_SAME_TOL, other parity at least NONJUDD_OTHER_MIN
    away) and must not coincide with a Judd point of the same (n, delta).
    Judd points do show up as zeros of the condition (the residue carries the
    algebraic factor), which is exactly why the oracle filter is mandatory.
    """
    if delta == 0.0:
        raise DegenerateCase("delta == 0 is degenerate at every baseline")
    scan = scan_nonjuddean_condition(
        n, parity, delta, g_range, omega=omega, points=points, tol=tol
    )
    judd_gs = [p.g_star for p in find_judd_points(
        n, delta, g_range, tol=tol, omega=omega, points=points
    )]
    accepted = []
    for g_star in scan.roots:
        if any(abs(g_star - jg) <= DISJOINT_G_TOL for jg in judd_gs):
            continue
        params = validate(ModelParams(omega=omega, g=g_star, delta=delta))
        residual = abs(nonjuddean_condition(n, parity, params))
        gaps = degeneracy_gap(params, baseline_energy(n, params))
        same = gaps.plus if parity is Parity.PLUS else gaps.minus
        other = gaps.minus if parity is Parity.PLUS else gaps.plus
        if same <= NONJUDD_SAME_TOL * omega and other >= NONJUDD_OTHER_MIN * omega:
            accepted.append(
                NonJuddeanPoint(
                    n=n,
                    parity=parity,
                    g_star=g_star,
                    delta=delta,
                    condition_residual=residual,
                    oracle_gap_same_parity=same,
                    oracle_gap_other_parity=other,
                )
            )
    return sorted(accepted, key=lambda p: p.g_star)


def classify_exceptional(
    n: int, params: ModelParams, tol: float = SCREEN_TOL
) -> ExceptionalClassification:
    """Decide whether baseline n carries an exceptional eigenvalue at the
    given parameter point.

    The cheap condition functions act as a screen; the oracle is consulted
    only when some screen fires (the expensive path), and its gap pattern
    makes the final call.  Verdict parity labels honor a recorded delta flip.
    """
    params = validate(params)
    if params.g == 0.0:
        raise ZeroCoupling("classification needs g > 0")
    inner = replace(params, delta_flipped=False, g_flipped=False)
    if params.delta == 0.0:
        gaps = degeneracy_gap(inner, baseline_energy(n, inner))
        return ExceptionalClassification(
            n=n,
            verdict=Verdict.JUDDEAN,
            evidence={
                "judd_constraint": 0.0,
                "gap_plus": gaps.plus,
                "gap_minus": gaps.minus,
            },
        )

    constraint = judd_constraint(n, inner)
    cond = {p: nonjuddean_condition(n, p, inner) for p in Parity}
    # the internal<->reported label map is its own inverse
    evidence = {
        "judd_constraint": constraint,
        "condition_plus": cond[_report(params, Parity.PLUS)],
        "condition_minus": cond[_report(params, Parity.MINUS)],
    }
    judd_screen = abs(constraint) <= tol
    nj_screen = {p: abs(cond[p]) <= tol for p in Parity}
    if not judd_screen and not any(nj_screen.values()):
        return ExceptionalClassification(
            n=n, verdict=Verdict.NOT_EXCEPTIONAL, evidence=evidence
        )

    gaps = degeneracy_gap(inner, baseline_energy(n, inner))
    evidence["gap_plus"] = gaps.plus if not params.delta_flipped else gaps.minus
    evidence["gap_minus"] = gaps.minus if not params.delta_flipped else gaps.plus
    omega = params.omega
    if judd_screen and max(gaps.plus, gaps.minus) <= JUDD_GAP_TOL * omega:
        return ExceptionalClassification(
            n=n, verdict=Verdict.JUDDEAN, evidence=evidence
        )
    for p in Parity:
        same = gaps.plus if p is Parity.PLUS else gaps.minus
        other = gaps.minus if p is Parity.PLUS else gaps.plus
        if (
            nj_screen[p]
            and same <= NONJUDD_SAME_TOL * omega
            and other >= NONJUDD_OTHER_MIN * omega
        ):
            reported = _report(params, p)
            verdict = (
                Verdict.NONJUDDEAN_PLUS
                if reported is Parity.PLUS
                else Verdict.NONJUDDEAN_MINUS
            )
            return ExceptionalClassification(n=n, verdict=verdict, evidence=evidence)
    return ExceptionalClassification(
        n=n, verdict=Verdict.NOT_EXCEPTIONAL, evidence=evidence
    )


def _report(params: ModelParams, parity: Parity) -> Parity:
    """Map an internal sector label to the reported one (self-inverse)."""
    if params.delta_flipped:
        return parity.flipped()
    return parity
