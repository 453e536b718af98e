"""Command-line front end.

One subcommand per library capability; every run writes exactly one output
artifact (CSV or JSON) to --out or standard output.  All energies are in
units of omega unless --omega is given.  Exit codes: 0 success, 1 runtime or
usage or parse error, 2 conjecture violation found (verify only) - a
violation is a finding, not a failure.

A flat key=value config file can preset any long option (keys use the option
name with '-' or '_'); explicit flags take precedence, unknown keys are
rejected before any computation starts.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import conjecture, exceptional, gfunction, oracle, spectrum
from .conjecture import SweepConfig, report_serialize, sweep
from .errors import QRabiError
from .model import ModelParams, Parity, validate
from .records import EigenvalueRecord

_UNITS_NOTE = (
    "All energies are in units of omega (omega defaults to 1); "
    "supplying --omega rescales inputs and outputs accordingly."
)


def _parse_parity(text: str) -> Parity:
    try:
        return Parity(text.strip().lower())
    except ValueError:
        raise argparse.ArgumentTypeError(f"parity must be plus or minus, got {text!r}")


def _parse_bool(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in str(text).split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")


@dataclass(frozen=True)
class Opt:
    flag: str
    convert: Callable[[str], Any]
    default: Any = None
    help: str = ""
    required: bool = False
    switch: bool = False  # boolean flag, config value parsed with _parse_bool

    @property
    def dest(self) -> str:
        return self.flag.replace("-", "_")


_COMMON = [
    Opt("config", str, None, "key=value file providing defaults for any option"),
    Opt("out", str, None, "output path (default: standard output)"),
]

_FORMAT = Opt("format", str, "csv", "output format: csv or json")

_SUBCOMMANDS: dict[str, list[Opt]] = {
    "gfunc": [
        Opt("g", float, required=True, help="coupling"),
        Opt("delta", float, required=True, help="half qubit splitting"),
        Opt("omega", float, 1.0, "boson frequency"),
        Opt("parity", _parse_parity, required=True, help="sector: plus or minus"),
        Opt("x-min", float, required=True, help="scan start in scaled x"),
        Opt("x-max", float, required=True, help="scan end in scaled x"),
        Opt("points", int, 200, "number of grid points (rows emitted)"),
        Opt("eps", float, gfunction.DEFAULT_EPS, "series truncation tolerance"),
    ],
    "spectrum": [
        Opt("g", float, required=True, help="coupling"),
        Opt("delta", float, required=True, help="half qubit splitting"),
        Opt("omega", float, 1.0, "boson frequency"),
        Opt("n-max", int, required=True, help="baseline ceiling (records have x < n-max)"),
        _FORMAT,
    ],
    "oracle": [
        Opt("g", float, required=True, help="coupling"),
        Opt("delta", float, required=True, help="half qubit splitting"),
        Opt("omega", float, 1.0, "boson frequency"),
        Opt("e-max", float, required=True, help="energy ceiling"),
        Opt("tol", float, 1e-10, "truncation convergence tolerance"),
        _FORMAT,
    ],
    "judd": [
        Opt("n", int, required=True, help="baseline index"),
        Opt("delta", float, required=True, help="half qubit splitting (> 0)"),
        Opt("omega", float, 1.0, "boson frequency"),
        Opt("g-min", float, required=True, help="coupling scan start"),
        Opt("g-max", float, required=True, help="coupling scan end"),
        Opt("tol", float, 1e-10, "bisection tolerance in g"),
        Opt("points", int, 400, "scan grid size"),
        Opt("emit-scan", _parse_bool, False, "emit the constraint curve instead of points", switch=True),
        _FORMAT,
    ],
    "nonjuddean": [
        Opt("n", int, required=True, help="baseline index"),
        Opt("parity", _parse_parity, required=True, help="sector: plus or minus"),
        Opt("delta", float, required=True, help="half qubit splitting (> 0)"),
        Opt("omega", float, 1.0, "boson frequency"),
        Opt("g-min", float, required=True, help="coupling scan start"),
        Opt("g-max", float, required=True, help="coupling scan end"),
        Opt("tol", float, 1e-10, "bisection tolerance in g"),
        Opt("points", int, 400, "scan grid size"),
        Opt("emit-scan", _parse_bool, False, "emit the condition curve instead of points", switch=True),
        _FORMAT,
    ],
    "crosscheck": [
        Opt("g", float, required=True, help="coupling"),
        Opt("delta", float, required=True, help="half qubit splitting"),
        Opt("omega", float, 1.0, "boson frequency"),
        Opt("n-max", int, required=True, help="baseline ceiling"),
        Opt("tol", float, 1e-8, "matching tolerance in energy"),
    ],
    "asymptotic": [
        Opt("delta", float, required=True, help="half qubit splitting"),
        Opt("g-values", _parse_float_list, required=True,
            help="comma-separated ascending couplings, all >= 1.5"),
        Opt("n-max", int, 4, "number of baselines tabulated"),
        Opt("omega", float, 1.0, "boson frequency"),
        _FORMAT,
    ],
    "verify": [
        Opt("g-min", float, required=True, help="coupling grid start"),
        Opt("g-max", float, required=True, help="coupling grid end"),
        Opt("g-steps", int, required=True, help="coupling grid size"),
        Opt("delta-min", float, required=True, help="delta grid start"),
        Opt("delta-max", float, required=True, help="delta grid end"),
        Opt("delta-steps", int, required=True, help="delta grid size"),
        Opt("n-max", int, 8, "intervals 0..n-max-1 are censused"),
        Opt("omega", float, 1.0, "boson frequency"),
        Opt("predicate", str, "extended", "predicate version: classic or extended"),
        Opt("attribution", str, "right",
            "exceptional attribution rule: right, left, or split"),
        Opt("jobs", int, 1, "worker processes (hint; output is identical)"),
        Opt("timestamp", _parse_bool, False,
            "include wall-clock timing in the report (breaks byte determinism)",
            switch=True),
    ],
}

_HELP = {
    "gfunc": "tabulate G(x) for one parity sector as CSV",
    "spectrum": "solve the low-lying spectrum via G-function roots",
    "oracle": "reference spectrum by truncated-Fock diagonalization",
    "judd": "locate doubly degenerate (algebraic) baseline crossings",
    "nonjuddean": "locate one-parity (transcendental) baseline crossings",
    "crosscheck": "match the G-function spectrum against the oracle",
    "asymptotic": "tabulate strong-coupling parity splittings",
    "verify": "sweep a (g, delta) grid and check the interval-counting law",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrabi",
        description="Quantum Rabi model spectra via parity G-functions, "
        "with an independent truncated-Fock oracle.",
        epilog=_UNITS_NOTE,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, opts in _SUBCOMMANDS.items():
        sub = subparsers.add_parser(name, help=_HELP[name], epilog=_UNITS_NOTE)
        for opt in opts + _COMMON:
            if opt.switch:
                sub.add_argument(
                    f"--{opt.flag}", dest=opt.dest, action="store_const",
                    const=True, default=None, help=opt.help,
                )
            else:
                sub.add_argument(
                    f"--{opt.flag}", dest=opt.dest, type=opt.convert,
                    default=None, help=opt.help,
                )
    return parser


def _read_config(path: str) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise QRabiError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args: argparse.Namespace, opts: list[Opt]) -> dict[str, Any]:
    """Merge CLI flags over config-file values over defaults; validate."""
    table = {opt.dest: opt for opt in opts + _COMMON}
    resolved: dict[str, Any] = {}
    config_values: dict[str, str] = {}
    if args.config is not None:
        config_values = _read_config(args.config)
        unknown = set(config_values) - set(table) - {"config"}
        if unknown:
            raise QRabiError(f"unknown config keys: {sorted(unknown)}")
    for dest, opt in table.items():
        value = getattr(args, dest, None)
        if value is None and dest in config_values:
            convert = _parse_bool if opt.switch else opt.convert
            value = convert(config_values[dest])
        if value is None:
            value = opt.default if not opt.switch else (opt.default or False)
        if value is None and opt.required:
            raise QRabiError(f"missing required option --{opt.flag}")
        resolved[dest] = value
    return resolved


def _num(value: float) -> str:
    return format(float(value), ".17g")


def _write(text: str, out: str | None):
    data = text.encode("utf-8")
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(out).write_bytes(data)


def _csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(
            ",".join(_num(v) if isinstance(v, float) else str(v) for v in row)
        )
    return "\n".join(lines) + "\n"


def _record_rows(records: list[EigenvalueRecord]) -> list[list]:
    return [
        [r.energy, r.x, str(r.parity), str(r.classification), r.interval_index,
         str(r.source), r.uncertainty]
        for r in records
    ]


_RECORD_HEADER = [
    "energy", "x", "parity", "classification", "interval_index", "source",
    "uncertainty",
]


def _records_json(records: list[EigenvalueRecord]) -> list[dict]:
    return [
        {
            "energy": r.energy,
            "x": r.x,
            "parity": r.parity.value,
            "classification": r.classification.value,
            "interval_index": r.interval_index,
            "source": r.source.value,
            "uncertainty": r.uncertainty,
        }
        for r in records
    ]


def _emit_records(records, opt, extra: dict | None = None):
    if opt["format"] == "json":
        payload = dict(extra or {})
        payload["records"] = _records_json(records)
        _write(conjecture.emit_json(payload) + "\n", opt["out"])
    else:
        _write(_csv(_RECORD_HEADER, _record_rows(records)), opt["out"])


def _cmd_gfunc(opt) -> int:
    params = validate(ModelParams(omega=opt["omega"], g=opt["g"], delta=opt["delta"]))
    sector = params.report_parity(opt["parity"])
    xs = np.linspace(opt["x_min"], opt["x_max"], opt["points"])
    values, errors, _ = gfunction.g_eval_grid(sector, xs, params, eps=opt["eps"])
    rows = [[float(x), float(v), float(e)] for x, v, e in zip(xs, values, errors)]
    _write(_csv(["x", "G", "error_estimate"], rows), opt["out"])
    return 0


def _cmd_spectrum(opt) -> int:
    params = ModelParams(omega=opt["omega"], g=opt["g"], delta=opt["delta"])
    records = spectrum.solve_spectrum(params, opt["n_max"])
    _emit_records(records, opt, extra={
        "omega": opt["omega"], "g": opt["g"], "delta": opt["delta"],
        "n_max": opt["n_max"],
    })
    return 0


def _cmd_oracle(opt) -> int:
    params = ModelParams(omega=opt["omega"], g=opt["g"], delta=opt["delta"])
    result = oracle.oracle_spectrum(params, opt["e_max"], tol=opt["tol"])
    _emit_records(result.records, opt, extra={
        "omega": opt["omega"], "g": opt["g"], "delta": opt["delta"],
        "M": result.M, "convergence_gap": result.convergence_gap,
    })
    return 0


def _cmd_judd(opt) -> int:
    if opt["emit_scan"]:
        scan = exceptional.scan_judd_constraint(
            opt["n"], opt["delta"], (opt["g_min"], opt["g_max"]),
            omega=opt["omega"], points=opt["points"], tol=opt["tol"],
        )
        rows = [[float(g), float(v)] for g, v in zip(scan.grid, scan.values)]
        _write(_csv(["g", "judd_constraint"], rows), opt["out"])
        return 0
    found = exceptional.find_judd_points(
        opt["n"], opt["delta"], (opt["g_min"], opt["g_max"]),
        tol=opt["tol"], omega=opt["omega"], points=opt["points"],
    )
    if opt["format"] == "json":
        payload = {
            "n": opt["n"], "delta": opt["delta"],
            "points": [
                {"n": p.n, "g_star": p.g_star, "delta": p.delta,
                 "residual": p.residual, "oracle_gap": p.oracle_gap}
                for p in found
            ],
        }
        _write(conjecture.emit_json(payload) + "\n", opt["out"])
    else:
        rows = [[p.n, p.g_star, p.delta, p.residual, p.oracle_gap] for p in found]
        _write(_csv(["n", "g_star", "delta", "residual", "oracle_gap"], rows),
               opt["out"])
    return 0


def _cmd_nonjuddean(opt) -> int:
    if opt["emit_scan"]:
        scan = exceptional.scan_nonjuddean_condition(
            opt["n"], opt["parity"], opt["delta"], (opt["g_min"], opt["g_max"]),
            omega=opt["omega"], points=opt["points"], tol=opt["tol"],
        )
        rows = [[float(g), float(v)] for g, v in zip(scan.grid, scan.values)]
        _write(_csv(["g", "condition"], rows), opt["out"])
        return 0
    found = exceptional.find_nonjuddean_points(
        opt["n"], opt["parity"], opt["delta"], (opt["g_min"], opt["g_max"]),
        tol=opt["tol"], omega=opt["omega"], points=opt["points"],
    )
    if opt["format"] == "json":
        payload = {
            "n": opt["n"], "parity": opt["parity"].value, "delta": opt["delta"],
            "points": [
                {"n": p.n, "parity": p.parity.value, "g_star": p.g_star,
                 "delta": p.delta, "condition_residual": p.condition_residual,
                 "oracle_gap_same_parity": p.oracle_gap_same_parity,
                 "oracle_gap_other_parity": p.oracle_gap_other_parity}
                for p in found
            ],
        }
        _write(conjecture.emit_json(payload) + "\n", opt["out"])
    else:
        rows = [
            [p.n, str(p.parity), p.g_star, p.delta, p.condition_residual,
             p.oracle_gap_same_parity, p.oracle_gap_other_parity]
            for p in found
        ]
        _write(
            _csv(["n", "parity", "g_star", "delta", "condition_residual",
                  "oracle_gap_same_parity", "oracle_gap_other_parity"], rows),
            opt["out"],
        )
    return 0


def _cmd_crosscheck(opt) -> int:
    params = ModelParams(omega=opt["omega"], g=opt["g"], delta=opt["delta"])
    report = spectrum.crosscheck(params, opt["n_max"], opt["tol"])
    payload = {
        "passed": report.passed,
        "tol": report.tol,
        "max_deviation": report.max_deviation,
        "matched": len(report.matched),
        "mismatched": len(report.mismatched),
        "unmatched_gfunction": _records_json(report.unmatched_gfunction),
        "unmatched_oracle": _records_json(report.unmatched_oracle),
    }
    _write(conjecture.emit_json(payload) + "\n", opt["out"])
    return 0 if report.passed else 1


def _cmd_asymptotic(opt) -> int:
    table = spectrum.asymptotic_check(
        opt["delta"], list(opt["g_values"]), n_max=opt["n_max"], omega=opt["omega"]
    )
    if opt["format"] == "json":
        payload = {
            "delta": table.delta,
            "n_max": table.n_max,
            "decay_rate": table.decay_rate,
            "rows": [
                {"g": row.g, "status": row.status,
                 "splittings": None if row.splittings is None else list(row.splittings)}
                for row in table.rows
            ],
        }
        _write(conjecture.emit_json(payload) + "\n", opt["out"])
    else:
        header = ["g", "status"] + [f"s{n}" for n in range(table.n_max)]
        rows = []
        for row in table.rows:
            cells: list = [row.g, row.status]
            cells += list(row.splittings) if row.splittings is not None else [""] * table.n_max
            rows.append(cells)
        _write(_csv(header, rows), opt["out"])
    return 0


def _cmd_verify(opt) -> int:
    if opt["predicate"] not in conjecture.PREDICATE_VERSIONS:
        raise QRabiError(f"unknown predicate version {opt['predicate']!r}")
    if opt["attribution"] not in conjecture.ATTRIBUTION_RULES:
        raise QRabiError(f"unknown attribution rule {opt['attribution']!r}")
    config = SweepConfig(
        g_grid=tuple(np.linspace(opt["g_min"], opt["g_max"], opt["g_steps"])),
        delta_grid=tuple(np.linspace(opt["delta_min"], opt["delta_max"],
                                     opt["delta_steps"])),
        n_max=opt["n_max"],
        predicate_version=opt["predicate"],
        attribution=opt["attribution"],
        omega=opt["omega"],
        jobs=opt["jobs"],
        record_timing=opt["timestamp"],
    )
    report = sweep(config)
    _write(report_serialize(report).decode("utf-8"), opt["out"])
    if report.summary.errored_points > 0:
        return 1
    if report.summary.violating_points > 0:
        return 2
    return 0


_DISPATCH = {
    "gfunc": _cmd_gfunc,
    "spectrum": _cmd_spectrum,
    "oracle": _cmd_oracle,
    "judd": _cmd_judd,
    "nonjuddean": _cmd_nonjuddean,
    "crosscheck": _cmd_crosscheck,
    "asymptotic": _cmd_asymptotic,
    "verify": _cmd_verify,
}


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors; 2 is reserved for
        # conjecture violations here, so remap.
        return 0 if exc.code == 0 else 1
    try:
        opt = _resolve(args, _SUBCOMMANDS[args.command])
        return _DISPATCH[args.command](opt)
    except QRabiError as exc:
        print(f"qrabi {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"qrabi {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
