"""Independent ground truth by dense diagonalization in truncated Fock space.

Each parity sector of the Rabi Hamiltonian is a symmetric tridiagonal matrix
in the Fock basis,

    diag[k] = omega*k + p*delta*(-1)^k,      off[k] = g*sqrt(k+1),

which is diagonalized densely with LAPACK's tridiagonal solvers.  Truncation
error is controlled by refining M until the spectrum below the requested
ceiling is stationary; the g = 0 and delta = 0 limits short-circuit to their
closed forms.  Everything here is convention-proof evidence for the
G-function machinery, so this module never imports it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceFailure,
    InvalidTruncation,
    TruncationExceeded,
)
from .model import PARITIES, ModelParams, Parity, baseline_energy, scaled_x, validate
from .records import Classification, EigenvalueRecord, Source

M_START = 120
M_STEP = 60
M_CHECK = 50  # convergence gap compares E(M) against E(M + M_CHECK)
M_CAP = 1200


@dataclass(frozen=True)
class ParityMatrix:
    """Symmetric tridiagonal parity-sector Hamiltonian in the Fock basis."""

    parity: Parity
    dim: int
    diagonal: np.ndarray
    offdiagonal: np.ndarray


@dataclass(frozen=True)
class OracleSpectrum:
    """Converged reference spectrum below a ceiling, both parities merged."""

    params: ModelParams
    M: int
    records: list[EigenvalueRecord]
    convergence_gap: float


class DegeneracyGap(NamedTuple):
    """Per-parity distance of the nearest eigenvalue to a target energy."""

    plus: float
    minus: float


def build_parity_matrix(parity: Parity, params: ModelParams, M: int) -> ParityMatrix:
    """Assemble the sector Hamiltonian on the lowest M Fock levels."""
    if M < 2:
        raise InvalidTruncation(f"need at least 2 Fock levels, got M={M}")
    params = validate(params)
    k = np.arange(M, dtype=float)
    diagonal = params.omega * k + parity.sign * params.delta * ((-1.0) ** k)
    offdiagonal = params.g * np.sqrt(k[: M - 1] + 1.0)
    return ParityMatrix(parity=parity, dim=M, diagonal=diagonal, offdiagonal=offdiagonal)


def lowest_eigenvalues(matrix: ParityMatrix, k: int) -> np.ndarray:
    """The k smallest eigenvalues, ascending, via LAPACK's backward-stable
    tridiagonal solver."""
    if k > matrix.dim:
        raise InvalidTruncation(f"requested {k} eigenvalues from dim {matrix.dim}")
    try:
        vals = scipy.linalg.eigh_tridiagonal(
            matrix.diagonal,
            matrix.offdiagonal,
            eigvals_only=True,
            select="i",
            select_range=(0, k - 1),
        )
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(str(exc)) from exc
    return np.asarray(vals, dtype=float)


def _sector_eigenvalues(parity: Parity, params: ModelParams, M: int) -> np.ndarray:
    matrix = build_parity_matrix(parity, params, M)
    try:
        return scipy.linalg.eigh_tridiagonal(
            matrix.diagonal, matrix.offdiagonal, eigvals_only=True
        )
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(str(exc)) from exc


def _record(energy: float, parity: Parity, params: ModelParams, uncertainty: float
            ) -> EigenvalueRecord:
    x = scaled_x(energy, params)
    return EigenvalueRecord(
        energy=energy,
        x=x,
        parity=params.report_parity(parity),
        classification=Classification.REGULAR,
        interval_index=math.floor(x),
        source=Source.ORACLE,
        uncertainty=uncertainty,
    )


def _closed_form_records(params: ModelParams, E_max: float) -> list[EigenvalueRecord]:
    """Exact spectra for the decoupled (g=0) and degenerate (delta=0) limits."""
    records = []
    if params.g == 0.0:
        # omega*k - delta > E_max guarantees every later level is above too
        k_top = max(0, math.ceil((E_max + params.delta) / params.omega)) + 1
        for parity in PARITIES:
            for k in range(k_top + 1):
                energy = params.omega * k + parity.sign * params.delta * ((-1.0) ** k)
                if energy <= E_max:
                    records.append(_record(energy, parity, params, 0.0))
    else:  # delta == 0: displaced oscillator, both sectors identical
        shift = params.g * params.g / params.omega
        k = 0
        while params.omega * k - shift <= E_max:
            for parity in PARITIES:
                records.append(_record(params.omega * k - shift, parity, params, 0.0))
            k += 1
    records.sort(key=EigenvalueRecord.sort_key)
    return records


def oracle_spectrum(
    params: ModelParams, E_max: float, tol: float = 1e-10
) -> OracleSpectrum:
    """All eigenvalues with E <= E_max from both parity sectors.

    The truncation M grows in steps of M_STEP until every reported level
    moves by less than tol when M is extended by M_CHECK; the converged run's
    larger-M values are the ones reported.
    """
    params = validate(params)
    if not math.isfinite(E_max):
        raise ValueError("E_max must be finite")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if params.g == 0.0 or params.delta == 0.0:
        return OracleSpectrum(
            params=params,
            M=0,
            records=_closed_form_records(params, E_max),
            convergence_gap=0.0,
        )
    M = M_START
    while True:
        gap = 0.0
        records = []
        for parity in PARITIES:
            coarse = _sector_eigenvalues(parity, params, M)
            fine = _sector_eigenvalues(parity, params, M + M_CHECK)
            keep = fine[fine <= E_max]
            if keep.size > M // 2:
                # ceiling reaches into the truncation-polluted upper spectrum
                gap = math.inf
                break
            if keep.size:
                gap = max(gap, float(np.abs(coarse[: keep.size] - keep).max()))
            for energy in keep:
                records.append(_record(float(energy), parity, params, tol))
        if gap < tol:
            records.sort(key=EigenvalueRecord.sort_key)
            return OracleSpectrum(
                params=params, M=M + M_CHECK, records=records, convergence_gap=gap
            )
        M += M_STEP
        if M > M_CAP:
            raise TruncationExceeded(M_CAP, gap)


def degeneracy_gap(
    params: ModelParams, E_target: float, tol: float = 1e-10
) -> DegeneracyGap:
    """Distance of each parity's nearest eigenvalue to E_target.

    A doubly degenerate baseline has both gaps small; a one-parity exceptional
    eigenvalue has exactly one small gap.
    """
    params = validate(params)
    spectrum = oracle_spectrum(params, E_target + 2.0 * params.omega, tol=tol)
    gaps = {}
    for parity in PARITIES:
        energies = [r.energy for r in spectrum.records if r.parity is parity]
        if not energies:
            gaps[parity] = math.inf
        else:
            gaps[parity] = float(np.min(np.abs(np.asarray(energies) - E_target)))
    return DegeneracyGap(plus=gaps[Parity.PLUS], minus=gaps[Parity.MINUS])


def degeneracy_crossing(
    n: int,
    delta: float,
    g_lo: float,
    g_hi: float,
    omega: float = 1.0,
    xtol: float = 1e-10,
    tol: float = 1e-10,
) -> float:
    """Oracle-only locator for a two-parity degeneracy on baseline n.

    Bisects on the signed difference between the two parities' nearest
    eigenvalues around the baseline energy; at a doubly degenerate crossing
    the difference changes sign.  Raises ValueError when the bracket carries
    no sign change.  Independent of every G-function quantity by design.
    """

    def signed_diff(g: float) -> float:
        params = validate(ModelParams(omega=omega, g=g, delta=delta))
        target = baseline_energy(n, params)
        spectrum = oracle_spectrum(params, target + 2.0 * omega, tol=tol)
        nearest = {}
        for parity in PARITIES:
            energies = np.asarray(
                [r.energy for r in spectrum.records if r.parity is parity]
            )
            nearest[parity] = energies[np.argmin(np.abs(energies - target))]
        return float(nearest[Parity.PLUS] - nearest[Parity.MINUS])

    f_lo = signed_diff(g_lo)
    f_hi = signed_diff(g_hi)
    if f_lo == 0.0:
        return g_lo
    if f_hi == 0.0:
        return g_hi
    if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise ValueError(
            f"no parity-crossing sign change on [{g_lo}, {g_hi}] for baseline {n}"
        )
    while g_hi - g_lo > xtol:
        mid = 0.5 * (g_lo + g_hi)
        f_mid = signed_diff(mid)
        if f_mid == 0.0:
            return mid
        if math.copysign(1.0, f_mid) == math.copysign(1.0, f_lo):
            g_lo, f_lo = mid, f_mid
        else:
            g_hi = mid
    return 0.5 * (g_lo + g_hi)
