"""Interval-counting predicates, parameter sweeps, and report round-tripping.

The counting statement checked here asserts, per parity sector, that

  (a) every open baseline interval holds 0, 1, or 2 regular eigenvalues, and
  (b) an interval holding 2 either touches a same-parity interval holding 0
      or holds no eigenvalue of the opposite parity.

The second disjunct matters: for delta > omega the spectrum genuinely
produces same-parity patterns like (1, 0, 1, 2, 1), where the two-zero
interval has no same-parity empty neighbor, yet the opposite sector always
leaves that interval empty (equivalently, the two sectors together never put
more than two eigenvalues in one interval).  Both dialects agree on
single-sector data, where the cross-parity disjunct is unavailable.

The extended predicate first folds exceptional baseline eigenvalues into
effective interval counts under a configurable attribution rule; the rule is
data, recorded in every report, because the counting statement itself does
not dictate which side of its baseline an on-the-fence eigenvalue belongs
to.  The default rule "right" assigns a baseline eigenvalue at x = n to the
interval [n, n+1), i.e. the same closed-left convention the eigenvalue
records use for their interval index.

A violation is a reportable finding, never an exception: a counterexample
would be a result, not a bug.
"""

from __future__ import annotations

import json
import math
import multiprocessing
import time
from dataclasses import dataclass, field

from .errors import IncompleteCoverage, ParseError
from .exceptional import (
    SCREEN_TOL,
    ExceptionalClassification,
    Verdict,
    classify_exceptional,
)
from .model import PARITIES, ModelParams, Parity, validate
from .spectrum import DEFAULT_SCAN, IntervalCensus, ScanConfig, count_zeros_in_interval

REPORT_VERSION = "1"

ATTRIBUTION_RULES = ("right", "left", "split")
PREDICATE_VERSIONS = ("classic", "extended")


@dataclass(frozen=True)
class Violation:
    n: int
    parity: Parity
    count: int
    reason: str


@dataclass(frozen=True)
class ConjecturePredicateResult:
    holds: bool
    violations: tuple[Violation, ...]
    predicate_version: str


def _counts_by_parity(
    censuses: list[IntervalCensus],
) -> dict[Parity, dict[int, int]]:
    table: dict[Parity, dict[int, int]] = {p: {} for p in PARITIES}
    for census in censuses:
        table[census.parity][census.n] = census.count
    for parity, counts in table.items():
        if not counts:
            continue
        ns = sorted(counts)
        if ns != list(range(ns[0], ns[-1] + 1)):
            raise IncompleteCoverage(
                f"{parity} censuses leave gaps in the covered range {ns}"
            )
    return table


def _check_clauses(
    table: dict[Parity, dict[int, int]], version: str
) -> ConjecturePredicateResult:
    violations: list[Violation] = []
    for parity in PARITIES:
        counts = table[parity]
        other = table[parity.flipped()]
        for n in sorted(counts):
            count = counts[n]
            if count > 2:
                violations.append(
                    Violation(n, parity, count, "count exceeds 2")
                )
                continue
            if count == 2:
                # boundary intervals check only their in-range neighbor(s)
                neighbors = [m for m in (n - 1, n + 1) if m in counts]
                adjacent_ok = not neighbors or any(counts[m] == 0 for m in neighbors)
                cross_ok = other.get(n) == 0
                if not adjacent_ok and not cross_ok:
                    violations.append(
                        Violation(
                            n,
                            parity,
                            count,
                            "no in-range neighbor interval with count 0 and "
                            "the opposite parity occupies the interval",
                        )
                    )
    return ConjecturePredicateResult(
        holds=not violations,
        violations=tuple(violations),
        predicate_version=version,
    )


def predicate_classic(censuses: list[IntervalCensus]) -> ConjecturePredicateResult:
    """Raw-count clauses on a contiguous covered range.

    Clause (a): every count in {0, 1, 2}.  Clause (b): every count-2 interval
    is adjacent to a same-parity count-0 interval within the covered range
    (boundary intervals check only their in-range neighbor) or carries no
    zeros of the opposite parity.  With censuses from one sector only, the
    cross-parity disjunct never fires and the check reduces to plain
    same-parity adjacency.
    """
    return _check_clauses(_counts_by_parity(censuses), "classic")


def _attribution_targets(
    verdict: Verdict, n: int, rule: str
) -> list[tuple[Parity, int]]:
    """(parity, interval) increments contributed by one baseline verdict."""
    if verdict is Verdict.JUDDEAN:
        pair = [(Parity.PLUS, n), (Parity.MINUS, n)]
        if rule == "left":
            pair = [(Parity.PLUS, n - 1), (Parity.MINUS, n - 1)]
        elif rule == "split":
            pair = [(Parity.PLUS, n), (Parity.MINUS, n - 1)]
        return pair
    if verdict in (Verdict.NONJUDDEAN_PLUS, Verdict.NONJUDDEAN_MINUS):
        parity = Parity.PLUS if verdict is Verdict.NONJUDDEAN_PLUS else Parity.MINUS
        target = n - 1 if rule == "left" else n
        return [(parity, target)]
    return []


def predicate_extended(
    censuses: list[IntervalCensus],
    exceptional_verdicts: list[ExceptionalClassification],
    attribution: str = "right",
) -> ConjecturePredicateResult:
    """Clauses on effective counts: exceptional baseline eigenvalues are
    folded into adjacent intervals under the attribution rule.

    Contributions aimed at intervals outside the covered range are dropped
    (the range boundary is already handled one-sidedly).  With no verdicts
    this reduces exactly to the classic predicate.
    """
    if attribution not in ATTRIBUTION_RULES:
        raise ValueError(f"unknown attribution rule {attribution!r}")
    table = _counts_by_parity(censuses)
    covered = {p: set(c) for p, c in table.items()}
    interior: set[int] = set()
    for counts in table.values():
        if counts:
            ns = sorted(counts)
            interior.update(range(ns[0] + 1, ns[-1] + 1))
    provided = {v.n for v in exceptional_verdicts}
    missing = interior - provided
    if missing:
        raise IncompleteCoverage(
            f"missing exceptional verdicts for interior baselines {sorted(missing)}"
        )
    effective = {p: dict(c) for p, c in table.items()}
    for verdict in exceptional_verdicts:
        for parity, target in _attribution_targets(
            verdict.verdict, verdict.n, attribution
        ):
            if target in covered[parity]:
                effective[parity][target] += 1
    return _check_clauses(effective, "extended")


@dataclass(frozen=True)
class SweepConfig:
    """Grid sweep description.

    `jobs` is a parallelism hint only; it is deliberately excluded from the
    serialized config echo so reports are byte-identical across worker
    counts.  `record_timing` gates every wall-clock field for the same
    reason.
    """

    g_grid: tuple[float, ...]
    delta_grid: tuple[float, ...]
    n_max: int = 8
    predicate_version: str = "extended"
    attribution: str = "right"
    omega: float = 1.0
    scan: ScanConfig = DEFAULT_SCAN
    classify_tol: float = SCREEN_TOL
    # execution hints: not semantics, not serialized, not part of equality
    jobs: int = field(default=1, compare=False)
    record_timing: bool = field(default=False, compare=False)

    def check(self):
        for name, grid in (("g_grid", self.g_grid), ("delta_grid", self.delta_grid)):
            if not grid:
                raise ValueError(f"{name} must be non-empty")
            if list(grid) != sorted(set(grid)):
                raise ValueError(f"{name} must be strictly increasing")
        if min(self.g_grid) <= 0.0:
            raise ValueError("all g grid values must be > 0")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.predicate_version not in PREDICATE_VERSIONS:
            raise ValueError(f"unknown predicate version {self.predicate_version!r}")
        if self.attribution not in ATTRIBUTION_RULES:
            raise ValueError(f"unknown attribution rule {self.attribution!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        self.scan.check()


@dataclass(frozen=True)
class CensusRow:
    n: int
    parity: Parity
    count: int
    zeros: tuple[float, ...]
    suspicious: bool


@dataclass(frozen=True)
class VerdictRow:
    n: int
    verdict: Verdict
    evidence: dict


@dataclass(frozen=True)
class PredicateRow:
    version: str
    holds: bool
    violations: tuple[Violation, ...]


@dataclass(frozen=True)
class SweepPoint:
    g: float
    delta: float
    status: str  # "OK" | "ERRORED"
    censuses: tuple[CensusRow, ...] = ()
    exceptional: tuple[VerdictRow, ...] = ()
    predicate: PredicateRow | None = None
    timing: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class SweepSummary:
    total_points: int
    violating_points: int
    errored_points: int
    suspicious_intervals: int
    runtime_s: float | None


@dataclass(frozen=True)
class ConjectureReport:
    version: str
    config: SweepConfig
    points: tuple[SweepPoint, ...]
    summary: SweepSummary


def evaluate_point(g: float, delta: float, config: SweepConfig) -> SweepPoint:
    """Censuses, baseline verdicts, and predicate at one grid point.

    Failures are captured into an ERRORED point rather than raised.
    """
    start = time.perf_counter() if config.record_timing else None
    try:
        params = validate(ModelParams(omega=config.omega, g=g, delta=delta))
        verdicts = {
            m: classify_exceptional(m, params, tol=config.classify_tol)
            for m in range(config.n_max + 1)
        }
        censuses = []
        for parity in PARITIES:
            for n in range(config.n_max):
                censuses.append(
                    count_zeros_in_interval(
                        parity, n, params, scan=config.scan, endpoint_verdicts=verdicts
                    )
                )
        verdict_list = [verdicts[m] for m in range(config.n_max + 1)]
        if config.predicate_version == "classic":
            pred = predicate_classic(censuses)
        else:
            pred = predicate_extended(censuses, verdict_list, config.attribution)
        elapsed = time.perf_counter() - start if start is not None else None
        return SweepPoint(
            g=g,
            delta=delta,
            status="OK",
            censuses=tuple(
                CensusRow(
                    n=c.n,
                    parity=c.parity,
                    count=c.count,
                    zeros=tuple(c.zeros),
                    suspicious=c.suspicious,
                )
                for c in censuses
            ),
            exceptional=tuple(
                VerdictRow(n=v.n, verdict=v.verdict, evidence=dict(v.evidence))
                for v in verdict_list
            ),
            predicate=PredicateRow(
                version=pred.predicate_version,
                holds=pred.holds,
                violations=pred.violations,
            ),
            timing=elapsed,
        )
    except Exception as exc:  # per-point failures must not abort the sweep
        elapsed = time.perf_counter() - start if start is not None else None
        return SweepPoint(
            g=g,
            delta=delta,
            status="ERRORED",
            timing=elapsed,
            error=f"{type(exc).__name__}: {exc}",
        )


def _evaluate_point_args(args: tuple[float, float, SweepConfig]) -> SweepPoint:
    return evaluate_point(*args)


def sweep(config: SweepConfig) -> ConjectureReport:
    """Run every (delta, g) grid point (delta outer, g inner) and assemble
    the report in row-major order regardless of execution order."""
    config.check()
    start = time.perf_counter() if config.record_timing else None
    tasks = [
        (g, delta, config) for delta in config.delta_grid for g in config.g_grid
    ]
    if config.jobs > 1:
        with multiprocessing.Pool(processes=config.jobs) as pool:
            points = pool.map(_evaluate_point_args, tasks)
    else:
        points = [_evaluate_point_args(t) for t in tasks]
    runtime = time.perf_counter() - start if start is not None else None
    violating = sum(
        1 for p in points if p.predicate is not None and not p.predicate.holds
    )
    errored = sum(1 for p in points if p.status == "ERRORED")
    suspicious = sum(
        1 for p in points for c in p.censuses if c.suspicious
    )
    return ConjectureReport(
        version=REPORT_VERSION,
        config=config,
        points=tuple(points),
        summary=SweepSummary(
            total_points=len(points),
            violating_points=violating,
            errored_points=errored,
            suspicious_intervals=suspicious,
            runtime_s=runtime,
        ),
    )


# ---------------------------------------------------------------------------
# Serialization: one JSON document, numbers at 17 significant digits, LF line
# endings, one line per sweep point.  The emitter is hand-rolled so float
# formatting and byte layout are fully pinned.


def emit_json(value) -> str:
    """Serialize a plain payload tree with the report's number formatting
    (17 significant digits); shared by the CLI's JSON outputs."""
    return _fmt(value)


def _fmt(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite number in report: {value!r}")
        return format(value, ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, dict):
        return (
            "{"
            + ", ".join(f"{json.dumps(k)}: {_fmt(v)}" for k, v in value.items())
            + "}"
        )
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _config_payload(config: SweepConfig) -> dict:
    return {
        "omega": config.omega,
        "g_grid": list(config.g_grid),
        "delta_grid": list(config.delta_grid),
        "n_max": config.n_max,
        "predicate_version": config.predicate_version,
        "attribution": config.attribution,
        "classify_tol": config.classify_tol,
        "scan": {
            "points": config.scan.points,
            "guard": config.scan.guard,
            "bisect_xtol": config.scan.bisect_xtol,
            "tangency_factor": config.scan.tangency_factor,
            "refine_density": config.scan.refine_density,
            "eps": config.scan.eps,
        },
    }


def _point_payload(point: SweepPoint) -> dict:
    payload = {
        "g": point.g,
        "delta": point.delta,
        "status": point.status,
        "censuses": [
            {
                "n": c.n,
                "parity": c.parity.value,
                "count": c.count,
                "zeros": list(c.zeros),
                "suspicious": c.suspicious,
            }
            for c in point.censuses
        ],
        "exceptional": [
            {"n": v.n, "verdict": v.verdict.value, "evidence": dict(v.evidence)}
            for v in point.exceptional
        ],
        "predicate": None
        if point.predicate is None
        else {
            "version": point.predicate.version,
            "holds": point.predicate.holds,
            "violations": [
                {
                    "n": v.n,
                    "parity": v.parity.value,
                    "count": v.count,
                    "reason": v.reason,
                }
                for v in point.predicate.violations
            ],
        },
        "timing": point.timing,
    }
    if point.error is not None:
        payload["error"] = point.error
    return payload


def report_serialize(report: ConjectureReport) -> bytes:
    lines = ["{"]
    lines.append(f'"version": {_fmt(report.version)},')
    lines.append(f'"config": {_fmt(_config_payload(report.config))},')
    lines.append('"points": [')
    for i, point in enumerate(report.points):
        comma = "," if i + 1 < len(report.points) else ""
        lines.append(_fmt(_point_payload(point)) + comma)
    lines.append("],")
    summary = {
        "total_points": report.summary.total_points,
        "violating_points": report.summary.violating_points,
        "errored_points": report.summary.errored_points,
        "suspicious_intervals": report.summary.suspicious_intervals,
        "runtime_s": report.summary.runtime_s,
    }
    lines.append(f'"summary": {_fmt(summary)}')
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _expect(mapping: dict, key: str, kind, caster=None):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ParseError("missing required key", field=key)
    value = mapping[key]
    if caster is not None:
        try:
            return caster(value)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad value for key: {exc}", field=key) from exc
    if kind is not None and not isinstance(value, kind):
        raise ParseError(
            f"expected {kind}, got {type(value).__name__}", field=key
        )
    return value


def _opt_float(value):
    return None if value is None else float(value)


def report_parse(data: bytes) -> ConjectureReport:
    """Lossless inverse of `report_serialize`."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ParseError(f"report is not UTF-8: {exc}", offset=exc.start) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", offset=exc.pos) from exc

    cfg = _expect(doc, "config", dict)
    scan_doc = _expect(cfg, "scan", dict)
    scan = ScanConfig(
        points=_expect(scan_doc, "points", None, int),
        guard=_expect(scan_doc, "guard", None, float),
        bisect_xtol=_expect(scan_doc, "bisect_xtol", None, float),
        tangency_factor=_expect(scan_doc, "tangency_factor", None, float),
        refine_density=_expect(scan_doc, "refine_density", None, int),
        eps=_expect(scan_doc, "eps", None, float),
    )
    config = SweepConfig(
        g_grid=tuple(float(v) for v in _expect(cfg, "g_grid", list)),
        delta_grid=tuple(float(v) for v in _expect(cfg, "delta_grid", list)),
        n_max=_expect(cfg, "n_max", None, int),
        predicate_version=_expect(cfg, "predicate_version", str),
        attribution=_expect(cfg, "attribution", str),
        omega=_expect(cfg, "omega", None, float),
        scan=scan,
        classify_tol=_expect(cfg, "classify_tol", None, float),
    )

    points = []
    for raw in _expect(doc, "points", list):
        status = _expect(raw, "status", str)
        censuses = tuple(
            CensusRow(
                n=_expect(c, "n", None, int),
                parity=Parity(_expect(c, "parity", str)),
                count=_expect(c, "count", None, int),
                zeros=tuple(float(z) for z in _expect(c, "zeros", list)),
                suspicious=_expect(c, "suspicious", bool),
            )
            for c in _expect(raw, "censuses", list)
        )
        exceptional = tuple(
            VerdictRow(
                n=_expect(v, "n", None, int),
                verdict=Verdict(_expect(v, "verdict", str)),
                evidence={k: float(x) for k, x in _expect(v, "evidence", dict).items()},
            )
            for v in _expect(raw, "exceptional", list)
        )
        raw_pred = _expect(raw, "predicate", None)
        predicate = None
        if raw_pred is not None:
            predicate = PredicateRow(
                version=_expect(raw_pred, "version", str),
                holds=_expect(raw_pred, "holds", bool),
                violations=tuple(
                    Violation(
                        n=_expect(v, "n", None, int),
                        parity=Parity(_expect(v, "parity", str)),
                        count=_expect(v, "count", None, int),
                        reason=_expect(v, "reason", str),
                    )
                    for v in _expect(raw_pred, "violations", list)
                ),
            )
        points.append(
            SweepPoint(
                g=_expect(raw, "g", None, float),
                delta=_expect(raw, "delta", None, float),
                status=status,
                censuses=censuses,
                exceptional=exceptional,
                predicate=predicate,
                timing=_opt_float(_expect(raw, "timing", None)),
                error=raw.get("error"),
            )
        )

    raw_summary = _expect(doc, "summary", dict)
    summary = SweepSummary(
        total_points=_expect(raw_summary, "total_points", None, int),
        violating_points=_expect(raw_summary, "violating_points", None, int),
        errored_points=_expect(raw_summary, "errored_points", None, int),
        suspicious_intervals=_expect(raw_summary, "suspicious_intervals", None, int),
        runtime_s=_opt_float(_expect(raw_summary, "runtime_s", None)),
    )
    return ConjectureReport(
        version=_expect(doc, "version", str),
        config=config,
        points=tuple(points),
        summary=summary,
    )
