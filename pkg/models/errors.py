"""Exception hierarchy shared by the services and the harness.

Each class also derives from the builtin a caller would naturally catch
(``ValueError`` for bad inputs, ``RuntimeError`` for numerical failures), so
``except ValueError`` keeps working at call sites.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from models.params import ProprietyReport


class GEBayesError(Exception):
    """Root of all toolkit errors."""


# ── Input errors ─────────────────────────────────────────────────────────────

class DomainError(GEBayesError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularityError(DomainError):
    """A closed-form expression is evaluated at one of its excluded points."""

    def __init__(self, point: float, message: str) -> None:
        super().__init__(message)
        self.point = point


class DatasetError(DomainError):
    """A dataset violates the invariants required for inference."""


class DataParseError(DomainError):
    """A data or sample file could not be parsed."""

    def __init__(self, message: str, line_no: int | None = None) -> None:
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"{message}{where}")
        self.line_no = line_no


class DegenerateChainError(DomainError):
    """A chain has no variation, so the diagnostic is undefined."""


class ImproperPosteriorError(GEBayesError, ValueError):
    """The prior/data combination fails the posterior propriety conditions."""

    def __init__(self, report: "ProprietyReport") -> None:
        super().__init__("posterior is not guaranteed proper: " + "; ".join(report.reasons))
        self.report = report


# ── Numerical failures ───────────────────────────────────────────────────────

class BracketError(GEBayesError, RuntimeError):
    """A maximum was found on the edge of the scanned interval."""

    def __init__(self, message: str, lower: float, upper: float) -> None:
        super().__init__(f"{message} [scanned {lower:.6g} … {upper:.6g}]")
        self.lower = lower
        self.upper = upper


class EmptySupportError(BracketError):
    """The log density is −∞ at every scan point."""


class SamplerEfficiencyError(GEBayesError, RuntimeError):
    """The rejection sampler accepts too rarely to be useful."""


class ConvergenceError(GEBayesError, RuntimeError):
    """An optimizer failed to locate an interior maximum."""


class RateUnderflowError(GEBayesError, RuntimeError):
    """A strictly positive quantity rounds to zero in double precision."""
