# mogpdr/errors.py
"""Exception hierarchy. Each top-level family maps onto one CLI exit code."""
from __future__ import annotations

__all__ = [
    "MoGPDRError",
    "ConfigError",
    "EmptySetError",
    "TrainingError",
    "GPConditioningError",
    "SolverFailure",
    "InvariantSetError",
    "AmbiguitySetError",
    "OracleGapError",
    "ContractViolation",
    "exit_code_for",
]


class MoGPDRError(Exception):
    """Base class for every error raised by this package."""

    exit_code: int = 1


class ConfigError(MoGPDRError):
    exit_code = 2


class EmptySetError(ConfigError):
    """A tightened constraint set came out empty."""

    def __init__(self, set_name: str, detail: str = "") -> None:
        self.set_name = set_name
        msg = f"tightened set '{set_name}' is empty"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class InvariantSetError(ConfigError):
    """mRPI / invariant set construction did not converge."""


class TrainingError(MoGPDRError):
    exit_code = 3


class GPConditioningError(TrainingError):
    """Cholesky factorisation of a kernel Gram matrix failed."""


class SolverFailure(MoGPDRError):
    exit_code = 4

    def __init__(self, message: str, status: str | None = None) -> None:
        self.status = status
        super().__init__(message)


class AmbiguitySetError(MoGPDRError):
    """Mean / variance / support combination cannot describe any distribution."""

    exit_code = 5


class OracleGapError(MoGPDRError):
    exit_code = 5


class ContractViolation(MoGPDRError):
    """Caller broke a precondition (e.g. applying the control law to a non-optimal step)."""


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, MoGPDRError):
        return exc.exit_code
    return 1
