"""Quantum Rabi model spectra.

Parity-resolved G-function root finding for the regular spectrum, algebraic
and transcendental locators for exceptional (baseline) eigenvalues, an
independent truncated-Fock diagonalization oracle, and an interval-counting
sweep harness with machine-readable reports.
"""

from .conjecture import (
    ConjecturePredicateResult,
    ConjectureReport,
    SweepConfig,
    Violation,
    predicate_classic,
    predicate_extended,
    report_parse,
    report_serialize,
    sweep,
)
from .errors import (
    ConvergenceFailure,
    DegenerateCase,
    IncompleteCoverage,
    InvalidParameter,
    InvalidTruncation,
    NonConvergence,
    ParseError,
    PoleProximity,
    QRabiError,
    TruncationExceeded,
    ZeroCoupling,
)
from .exceptional import (
    ExceptionalClassification,
    JuddPoint,
    NonJuddeanPoint,
    Verdict,
    classify_exceptional,
    find_judd_points,
    find_nonjuddean_points,
    judd_constraint,
    nonjuddean_condition,
)
from .gfunction import (
    GValue,
    RegularizedG,
    SeriesCoefficients,
    SplitGValue,
    g_derivative,
    g_eval,
    g_eval_grid,
    g_eval_regularized,
    g_eval_split,
    recurrence_coeffs,
)
from .model import (
    PARITIES,
    ModelParams,
    Parity,
    baseline_energy,
    energy_from_x,
    scaled_x,
    validate,
)
from .oracle import (
    DegeneracyGap,
    OracleSpectrum,
    ParityMatrix,
    build_parity_matrix,
    degeneracy_crossing,
    degeneracy_gap,
    lowest_eigenvalues,
    oracle_spectrum,
)
from .records import Classification, EigenvalueRecord, Source
from .spectrum import (
    DiffReport,
    IntervalCensus,
    ScanConfig,
    SplittingTable,
    asymptotic_check,
    count_zeros_in_interval,
    crosscheck,
    solve_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "ConjecturePredicateResult",
    "ConjectureReport",
    "ConvergenceFailure",
    "DegeneracyGap",
    "DegenerateCase",
    "DiffReport",
    "EigenvalueRecord",
    "ExceptionalClassification",
    "GValue",
    "IncompleteCoverage",
    "IntervalCensus",
    "InvalidParameter",
    "InvalidTruncation",
    "JuddPoint",
    "ModelParams",
    "NonConvergence",
    "NonJuddeanPoint",
    "OracleSpectrum",
    "PARITIES",
    "Parity",
    "ParityMatrix",
    "ParseError",
    "PoleProximity",
    "QRabiError",
    "RegularizedG",
    "ScanConfig",
    "SeriesCoefficients",
    "Source",
    "SplitGValue",
    "SplittingTable",
    "SweepConfig",
    "TruncationExceeded",
    "Verdict",
    "Violation",
    "ZeroCoupling",
    "asymptotic_check",
    "baseline_energy",
    "build_parity_matrix",
    "classify_exceptional",
    "count_zeros_in_interval",
    "crosscheck",
    "degeneracy_crossing",
    "degeneracy_gap",
    "energy_from_x",
    "find_judd_points",
    "find_nonjuddean_points",
    "g_derivative",
    "g_eval",
    "g_eval_grid",
    "g_eval_regularized",
    "g_eval_split",
    "judd_constraint",
    "lowest_eigenvalues",
    "nonjuddean_condition",
    "oracle_spectrum",
    "predicate_classic",
    "predicate_extended",
    "recurrence_coeffs",
    "report_parse",
    "report_serialize",
    "scaled_x",
    "solve_spectrum",
    "sweep",
    "validate",
]
