from __future__ import annotations

from typing import TYPE_CHECKING

from .enums import ExitCode

if TYPE_CHECKING:
    from .models import FidelitySeries, LanczosResult


class GFactorError(Exception):
    """Base class for failures that end a run with a dedicated exit code."""

    exit_code: ExitCode = ExitCode.SOLVER_FAILURE


class ConfigError(GFactorError):
    exit_code = ExitCode.CONFIG_ERROR


class SolverError(GFactorError):
    exit_code = ExitCode.SOLVER_FAILURE


class LanczosConvergenceError(SolverError):
    """Lanczos did not reach the residual bound; `best` holds the last Ritz pair."""

    def __init__(self, message: str, best: LanczosResult) -> None:
        super().__init__(message)
        self.best = best


class FidelitySeriesError(SolverError):
    """A solve failed inside a series; the completed points are kept in `partial`."""

    def __init__(self, message: str, size: int, partial: FidelitySeries | None) -> None:
        super().__init__(f"L={size}: {message}")
        self.size = size
        self.partial = partial


class OracleMismatchError(GFactorError):
    exit_code = ExitCode.ORACLE_MISMATCH

    def __init__(self, failed: list[str]) -> None:
        super().__init__(f"{len(failed)} oracle check(s) failed: {', '.join(failed)}")
        self.failed = failed


class StateNotInBasisError(LookupError):
    pass
