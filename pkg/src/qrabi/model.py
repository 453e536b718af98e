"""Hamiltonian convention, parameter validation, parity sectors, and the
scaled spectral coordinate.

Convention used throughout the package::

    H = omega * a^dag a + delta * sigma_z + g * sigma_x * (a + a^dag)

so the bare qubit splitting is ``2*delta``.  The conserved parity
``sigma_z * (-1)^{a^dag a}`` splits H into two sectors; written on a single
bosonic mode each sector reads

    H_p = omega * a^dag a + g * (a + a^dag) + p * delta * (-1)^{a^dag a}

with p = +1 for `Parity.PLUS` and p = -1 for `Parity.MINUS`.

The dimensionless spectral coordinate is

    x = E / omega + (g / omega)^2

so that the displaced-oscillator baselines E = n*omega - g^2/omega sit at
integer x = n.  All downstream numerics work in omega = 1 units; energies are
rescaled on entry and exit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .errors import InvalidParameter


@enum.unique
class Parity(enum.Enum):
    """Parity quantum number of the Z2 symmetry.

    Exactly two values; PLUS sorts before MINUS so that merged outputs are
    deterministic.
    """

    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        """+1 for PLUS, -1 for MINUS."""
        return 1 if self is Parity.PLUS else -1

    @property
    def order(self) -> int:
        """Sort key: PLUS < MINUS."""
        return 0 if self is Parity.PLUS else 1

    def flipped(self) -> "Parity":
        return Parity.MINUS if self is Parity.PLUS else Parity.PLUS

    def __lt__(self, other: "Parity") -> bool:
        return self.order < other.order

    def __str__(self) -> str:
        return self.value


PARITIES = (Parity.PLUS, Parity.MINUS)


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the Rabi Hamiltonian.

    omega : boson frequency (> 0), energy units
    g     : qubit-boson coupling, energy units
    delta : half the qubit splitting (coefficient of the sigma_z term)

    The spectrum is invariant under g -> -g, and invariant up to a parity
    relabeling under delta -> -delta.  `validate` stores both non-negative and
    records the flips; parity labels are swapped back at report time whenever
    `delta_flipped` is set.
    """

    omega: float
    g: float
    delta: float
    g_flipped: bool = False
    delta_flipped: bool = False

    def reduced(self) -> tuple[float, float]:
        """(g, delta) in omega = 1 units."""
        return self.g / self.omega, self.delta / self.omega

    def report_parity(self, parity: Parity) -> Parity:
        """Parity label to attach to outputs (undoes the delta sign flip)."""
        return parity.flipped() if self.delta_flipped else parity


def validate(params: ModelParams) -> ModelParams:
    """Normalize parameters: reject omega <= 0 or non-finite entries, map g
    and delta to their absolute values, and record the flips.

    Idempotent: validating an already-normalized instance returns an equal one.
    """
    for field in ("omega", "g", "delta"):
        value = getattr(params, field)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise InvalidParameter(field, value, "must be a finite real number")
    if params.omega <= 0:
        raise InvalidParameter("omega", params.omega, "must be > 0")
    g_flipped = params.g_flipped ^ (params.g < 0)
    delta_flipped = params.delta_flipped ^ (params.delta < 0)
    return replace(
        params,
        omega=float(params.omega),
        g=abs(float(params.g)),
        delta=abs(float(params.delta)),
        g_flipped=g_flipped,
        delta_flipped=delta_flipped,
    )


def scaled_x(energy: float, params: ModelParams) -> float:
    """Dimensionless spectral coordinate x = E/omega + (g/omega)^2."""
    g_r = params.g / params.omega
    return energy / params.omega + g_r * g_r


def energy_from_x(x: float, params: ModelParams) -> float:
    """Inverse of `scaled_x`: E = omega*x - g^2/omega."""
    return params.omega * x - params.g * params.g / params.omega


def baseline_energy(n: int, params: ModelParams) -> float:
    """Displaced-oscillator energy E = n*omega - g^2/omega at baseline n."""
    return energy_from_x(float(n), params)
