"""Exception types shared across the package."""

from __future__ import annotations


class QRabiError(Exception):
    """Base class for every package-specific error."""


class InvalidParameter(QRabiError):
    """A model parameter fails validation (non-finite, or omega <= 0)."""

    def __init__(self, field: str, value, reason: str = ""):
        self.field = field
        self.value = value
        self.reason = reason
        msg = f"invalid parameter {field}={value!r}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class ZeroCoupling(QRabiError):
    """The coefficient recurrence contains 1/g factors; g == 0 is not allowed.

    Zero coupling is handled by the oracle's closed-form path instead.
    """


class NonConvergence(QRabiError):
    """The series tail criterion was never met before the term cap."""

    def __init__(self, n_max: int, context: str = ""):
        self.n_max = n_max
        msg = f"series did not converge within {n_max} terms"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


class PoleProximity(QRabiError):
    """Direct evaluation requested too close to an integer pole of G."""

    def __init__(self, x: float, nearest_pole: int):
        self.x = x
        self.nearest_pole = nearest_pole
        super().__init__(
            f"x={x!r} is within the pole guard of x={nearest_pole}; "
            "use the regularized evaluation instead"
        )


class InvalidTruncation(QRabiError):
    """Fock truncation dimension too small to be meaningful."""


class TruncationExceeded(QRabiError):
    """Adaptive Fock truncation hit its hard cap before converging."""

    def __init__(self, m_cap: int, gap: float):
        self.m_cap = m_cap
        self.gap = gap
        super().__init__(
            f"truncation cap M={m_cap} reached with convergence gap {gap:.3e}"
        )


class ConvergenceFailure(QRabiError):
    """The dense eigensolver itself failed to converge."""


class DegenerateCase(QRabiError):
    """Request is ill-posed because the parameter point is globally degenerate
    (delta == 0 makes every baseline doubly degenerate)."""


class IncompleteCoverage(QRabiError):
    """Censuses passed to a counting predicate do not cover a contiguous
    baseline range."""


class ParseError(QRabiError):
    """A serialized report could not be parsed; carries location context."""

    def __init__(self, message: str, offset: int | None = None, field: str | None = None):
        self.offset = offset
        self.field = field
        if offset is not None:
            message += f" (offset {offset})"
        if field is not None:
            message += f" (field {field!r})"
        super().__init__(message)
