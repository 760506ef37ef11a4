"""
errors.py — exception hierarchy shared by every module.

ConfigError maps to CLI exit code 2, NumericalError (and subclasses) to exit code 3.
"""
from typing import Optional, Sequence


class MfschrodError(Exception):
    """Base class of every error raised by the library."""


class ConfigError(MfschrodError):
    """Config syntax error, unknown key or violated constraint."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class NumericalError(MfschrodError):
    """Base class of failures inside a solver or the surrogate machinery."""


class DomainError(NumericalError):
    """Input outside the mathematical domain (negative density, non-finite potential...)."""


class CflViolationError(NumericalError):
    def __init__(self, dt: float, bound: float):
        self.dt = dt
        self.bound = bound
        super().__init__(f"time step {dt:.6g} exceeds the CFL bound {bound:.6g}")


class EmptyEnsembleError(NumericalError):
    """Every FGA particle fell below the amplitude threshold."""


class SingularMatrixError(NumericalError):
    """Singular Z in the FGA amplitude equation, or an empty Gramian active set."""


class DegenerateBoundError(NumericalError):
    """High-fidelity distance in the empirical bound vanished."""


class ModelEvaluationError(NumericalError):
    def __init__(self, index: int, z: Sequence[float], cause: BaseException):
        self.index = index
        self.z = list(z)
        self.cause = cause
        zs = ", ".join(f"{v:.6g}" for v in self.z)
        super().__init__(f"model evaluation failed at sample {index} (z=[{zs}]): {cause}")


class ExperimentStageError(NumericalError):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
