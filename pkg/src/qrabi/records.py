"""Shared spectral-record types produced by both the G-function solver and
the truncated-Fock oracle."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .model import Parity


@enum.unique
class Classification(enum.Enum):
    REGULAR = "regular"
    EXCEPTIONAL_JUDDEAN = "exceptional_juddean"
    EXCEPTIONAL_NONJUDDEAN = "exceptional_nonjuddean"

    def __str__(self) -> str:
        return self.value


@enum.unique
class Source(enum.Enum):
    GFUNCTION = "gfunction"
    ORACLE = "oracle"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class EigenvalueRecord:
    """One spectral line.

    energy         : eigenvalue in the caller's energy units
    x              : scaled coordinate E/omega + (g/omega)^2
    parity         : sector label (already relabeled if delta was flipped)
    classification : regular root vs exceptional baseline eigenvalue
    interval_index : n with x in [n, n+1)
    source         : which machinery produced the record
    uncertainty    : energy half-width of the locator (refinement bracket for
                     regular roots, acceptance tolerance for exceptional ones)
    """

    energy: float
    x: float
    parity: Parity
    classification: Classification
    interval_index: int
    source: Source
    uncertainty: float

    def sort_key(self) -> tuple[float, int]:
        return (self.energy, self.parity.order)
