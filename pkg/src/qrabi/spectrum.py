"""Full low-lying spectrum assembly per parity sector.

Regular eigenvalues are zeros of G_p scanned and bisected inside each open
baseline interval (n, n+1); exceptional eigenvalues live exactly on the
integer endpoints and are delegated to the classification machinery.  Every
census keeps a guard band of 1e-4 in x at the endpoints: the band belongs to
the pole-adjacent machinery, the interior to the pole-free scan.

The minus sector's lowest level generally sits below x = 0 (it approaches
-delta/omega at weak coupling), so censuses extend down to
floor(-delta/omega); levels can never fall below that since the parity term
is bounded by delta in operator norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroCoupling
from .exceptional import (
    JUDD_GAP_TOL,
    NONJUDD_SAME_TOL,
    ExceptionalClassification,
    Verdict,
    classify_exceptional,
)
from .gfunction import DEFAULT_EPS, g_eval, g_eval_grid
from .model import PARITIES, ModelParams, Parity, baseline_energy, energy_from_x, validate
from .oracle import oracle_spectrum
from .records import Classification, EigenvalueRecord, Source
from .rootscan import fit_exponential_decay, scan_for_roots


@dataclass(frozen=True)
class ScanConfig:
    """Census scan policy.

    points          : uniform grid size per interval (the scan step follows)
    guard           : endpoint exclusion band in x
    bisect_xtol     : bracket width at which refinement stops
    tangency_factor : dip threshold as a fraction of the median |G| on the grid
    refine_density  : local re-scan densification on a suspected tangency
    eps             : series truncation tolerance
    """

    points: int = 200
    guard: float = 1e-4
    bisect_xtol: float = 1e-12
    tangency_factor: float = 1e-3
    refine_density: int = 10
    eps: float = DEFAULT_EPS

    @property
    def step(self) -> float:
        return (1.0 - 2.0 * self.guard) / (self.points - 1)

    def check(self):
        if self.points < 2 or self.step <= 0.0:
            raise ValueError("scan needs at least 2 points and a positive step")
        if not (0.0 < self.guard < 0.5):
            raise ValueError("guard must lie in (0, 0.5)")


DEFAULT_SCAN = ScanConfig()


@dataclass(frozen=True)
class IntervalCensus:
    """Zero count and refined zero locations of G_p on one open interval."""

    n: int
    parity: Parity
    count: int
    zeros: list[float]
    endpoint_exceptional_left: ExceptionalClassification | None
    endpoint_exceptional_right: ExceptionalClassification | None
    suspicious: bool


def count_zeros_in_interval(
    parity: Parity,
    n: int,
    params: ModelParams,
    scan: ScanConfig = DEFAULT_SCAN,
    endpoint_verdicts: dict[int, ExceptionalClassification] | None = None,
) -> IntervalCensus:
    """Census of G zeros on (n + guard, n+1 - guard) for the given sector.

    `parity` is the reported sector label; a recorded delta flip maps it to
    the internal sector before evaluation.  Endpoint classifications are
    computed on demand unless a precomputed verdict table is supplied
    (negative endpoints carry no baseline and get None).
    """
    params = validate(params)
    scan.check()
    if params.g == 0.0:
        raise ZeroCoupling("census needs g > 0; use the oracle closed form")
    sector = params.report_parity(parity)  # self-inverse label map
    lo = n + scan.guard
    hi = n + 1 - scan.guard
    grid = np.linspace(lo, hi, scan.points)
    values, _, _ = g_eval_grid(sector, grid, params, eps=scan.eps)

    def f(x: float) -> float:
        return g_eval(sector, x, params, eps=scan.eps).value

    result = scan_for_roots(
        f,
        lo,
        hi,
        scan.points,
        scan.bisect_xtol,
        tangency_factor=scan.tangency_factor,
        refine_density=scan.refine_density,
        values=values,
    )

    def verdict_at(m: int) -> ExceptionalClassification | None:
        if m < 0:
            return None
        if endpoint_verdicts is not None and m in endpoint_verdicts:
            return endpoint_verdicts[m]
        return classify_exceptional(m, params)

    return IntervalCensus(
        n=n,
        parity=parity,
        count=len(result.roots),
        zeros=list(result.roots),
        endpoint_exceptional_left=verdict_at(n),
        endpoint_exceptional_right=verdict_at(n + 1),
        suspicious=bool(result.tangential),
    )


def census_floor(params: ModelParams) -> int:
    """Lowest interval index that can hold spectrum: x >= -delta/omega."""
    params = validate(params)
    if params.delta == 0.0:
        return 0
    return math.floor(-params.delta / params.omega)


def _exceptional_records(
    verdicts: dict[int, ExceptionalClassification], params: ModelParams, n_max: int
) -> list[EigenvalueRecord]:
    records = []
    for m in range(n_max):
        v = verdicts[m]
        energy = baseline_energy(m, params)
        if v.verdict is Verdict.JUDDEAN:
            for parity in PARITIES:
                records.append(
                    EigenvalueRecord(
                        energy=energy,
                        x=float(m),
                        parity=parity,
                        classification=Classification.EXCEPTIONAL_JUDDEAN,
                        interval_index=m,
                        source=Source.GFUNCTION,
                        uncertainty=JUDD_GAP_TOL * params.omega,
                    )
                )
        elif v.verdict in (Verdict.NONJUDDEAN_PLUS, Verdict.NONJUDDEAN_MINUS):
            parity = (
                Parity.PLUS if v.verdict is Verdict.NONJUDDEAN_PLUS else Parity.MINUS
            )
            records.append(
                EigenvalueRecord(
                    energy=energy,
                    x=float(m),
                    parity=parity,
                    classification=Classification.EXCEPTIONAL_NONJUDDEAN,
                    interval_index=m,
                    source=Source.GFUNCTION,
                    uncertainty=NONJUDD_SAME_TOL * params.omega,
                )
            )
    return records


def solve_spectrum(
    params: ModelParams,
    n_max: int,
    scan: ScanConfig = DEFAULT_SCAN,
) -> list[EigenvalueRecord]:
    """Merged, energy-sorted spectrum with x < n_max (minus the guard band).

    Censuses run over every interval from `census_floor` up to n_max - 1 for
    both parities; baselines 0..n_max-1 contribute exceptional records per
    their classification.  g = 0 short-circuits to the oracle closed form
    (the recurrence is undefined there), keeping source = ORACLE.
    """
    params = validate(params)
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    ceiling_x = n_max - scan.guard
    if params.g == 0.0:
        spectrum = oracle_spectrum(params, energy_from_x(ceiling_x, params))
        return [r for r in spectrum.records if r.x < ceiling_x]

    verdicts = {m: classify_exceptional(m, params) for m in range(n_max + 1)}
    records = _exceptional_records(verdicts, params, n_max)
    for parity in PARITIES:
        for n in range(census_floor(params), n_max):
            census = count_zeros_in_interval(
                parity, n, params, scan=scan, endpoint_verdicts=verdicts
            )
            for x_root in census.zeros:
                records.append(
                    EigenvalueRecord(
                        energy=energy_from_x(x_root, params),
                        x=x_root,
                        parity=parity,
                        classification=Classification.REGULAR,
                        interval_index=math.floor(x_root),
                        source=Source.GFUNCTION,
                        uncertainty=scan.bisect_xtol * params.omega,
                    )
                )
    records.sort(key=EigenvalueRecord.sort_key)
    return records


@dataclass(frozen=True)
class MatchedPair:
    gfunction: EigenvalueRecord
    oracle: EigenvalueRecord

    @property
    def deviation(self) -> float:
        return abs(self.gfunction.energy - self.oracle.energy)


@dataclass(frozen=True)
class DiffReport:
    """Outcome of the G-function vs oracle cross-validation."""

    passed: bool
    tol: float
    max_deviation: float
    matched: list[MatchedPair]
    mismatched: list[MatchedPair]
    unmatched_gfunction: list[EigenvalueRecord]
    unmatched_oracle: list[EigenvalueRecord]


# Records farther apart than this are never considered the same level; well
# below the ~omega level spacing, well above every locator tolerance.
_MATCH_WINDOW = 1e-3


def crosscheck(
    params: ModelParams,
    n_max: int,
    tol: float,
    scan: ScanConfig = DEFAULT_SCAN,
) -> DiffReport:
    """One-to-one comparison of `solve_spectrum` against the oracle.

    Both sides are restricted to x < n_max - guard (the solver's reporting
    window).  PASS requires every record matched and no matched pair deviating
    by more than tol.
    """
    params = validate(params)
    ceiling_x = n_max - scan.guard
    solver_records = [
        r for r in solve_spectrum(params, n_max, scan=scan) if r.x < ceiling_x
    ]
    oracle_records = [
        r
        for r in oracle_spectrum(
            params, energy_from_x(ceiling_x, params), tol=min(tol, 1e-10)
        ).records
        if r.x < ceiling_x
    ]
    matched: list[MatchedPair] = []
    unmatched_g: list[EigenvalueRecord] = []
    unmatched_o: list[EigenvalueRecord] = []
    window = max(_MATCH_WINDOW * params.omega, 10.0 * tol)
    for parity in PARITIES:
        side_g = sorted(
            (r for r in solver_records if r.parity is parity), key=lambda r: r.energy
        )
        side_o = sorted(
            (r for r in oracle_records if r.parity is parity), key=lambda r: r.energy
        )
        i = j = 0
        while i < len(side_g) and j < len(side_o):
            dev = side_g[i].energy - side_o[j].energy
            if abs(dev) <= window:
                matched.append(MatchedPair(side_g[i], side_o[j]))
                i += 1
                j += 1
            elif dev < 0:
                unmatched_g.append(side_g[i])
                i += 1
            else:
                unmatched_o.append(side_o[j])
                j += 1
        unmatched_g.extend(side_g[i:])
        unmatched_o.extend(side_o[j:])
    mismatched = [p for p in matched if p.deviation > tol]
    max_dev = max((p.deviation for p in matched), default=0.0)
    passed = not unmatched_g and not unmatched_o and not mismatched
    return DiffReport(
        passed=passed,
        tol=tol,
        max_deviation=max_dev,
        matched=matched,
        mismatched=mismatched,
        unmatched_gfunction=unmatched_g,
        unmatched_oracle=unmatched_o,
    )


@dataclass(frozen=True)
class SplittingRow:
    g: float
    status: str  # "ok" | "truncation_exceeded"
    splittings: list[float] | None


@dataclass(frozen=True)
class SplittingTable:
    """Per-baseline parity splittings s_n(g) = |E_n(+) - E_n(-)| from the
    oracle, plus the fitted exponential decay rate of s_0 against g^2."""

    delta: float
    n_max: int
    rows: list[SplittingRow]
    decay_rate: float | None

    def splitting(self, n: int) -> list[float]:
        return [row.splittings[n] for row in self.rows if row.splittings is not None]


def asymptotic_check(
    delta: float,
    g_values: list[float],
    n_max: int = 4,
    omega: float = 1.0,
) -> SplittingTable:
    """Strong-coupling probe: tabulate parity splittings on each baseline.

    g_values must be ascending and >= 1.5 (the widely-split displaced-doublet
    regime where nearest-to-baseline pairing is unambiguous).  Truncation
    failures at extreme g are reported as rows, not raised.  delta = 0 yields
    identically zero splittings and no decay fit.
    """
    if list(g_values) != sorted(g_values) or (g_values and g_values[0] < 1.5):
        raise ValueError("g_values must be ascending and all >= 1.5")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    from .errors import TruncationExceeded

    rows = []
    for g in g_values:
        params = validate(ModelParams(omega=omega, g=g, delta=delta))
        try:
            spectrum = oracle_spectrum(
                params, energy_from_x(n_max + 0.5, params), tol=1e-10
            )
        except TruncationExceeded:
            rows.append(SplittingRow(g=g, status="truncation_exceeded", splittings=None))
            continue
        splittings = []
        for n in range(n_max):
            target = baseline_energy(n, params)
            nearest = {}
            for parity in PARITIES:
                energies = np.asarray(
                    [r.energy for r in spectrum.records if r.parity is parity]
                )
                nearest[parity] = float(energies[np.argmin(np.abs(energies - target))])
            splittings.append(abs(nearest[Parity.PLUS] - nearest[Parity.MINUS]))
        rows.append(SplittingRow(g=g, status="ok", splittings=splittings))

    s0 = [(row.g, row.splittings[0]) for row in rows if row.splittings is not None]
    decay_rate: float | None = None
    if len(s0) >= 2 and all(s > 0.0 for _, s in s0):
        decay_rate = fit_exponential_decay(
            [g * g for g, _ in s0], [s for _, s in s0]
        )
    return SplittingTable(delta=delta, n_max=n_max, rows=rows, decay_rate=decay_rate)
