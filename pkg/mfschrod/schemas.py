"""
schemas.py — typed records of the experiment config file.

Every section forbids unknown keys. Mesh dicts are checked per solver kind
by cli/config.py before validation, where the YAML line numbers are known.
"""
from fractions import Fraction
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator, model_validator

from config.settings import settings

ProblemId = Literal["test1", "test2a", "test2b_shift", "test2b_quadratic", "test2c_kl"]
SolverKind = Literal["tsfp", "fga", "levelset"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _fraction(value: Any) -> Any:
    """Accept "1/64" style strings for small parameters."""
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            return value
    return value


# "1/64" in YAML is a string
FractionFloat = Annotated[float, BeforeValidator(_fraction)]


class ProblemConfig(_Strict):
    id: ProblemId
    eps: FractionFloat = Field(gt=0.0, le=1.0)
    d1: int = Field(5, ge=1)
    t_final: Optional[FractionFloat] = Field(None, ge=0.0)
    kl_length: float = Field(0.5, gt=0.0)
    kl_sigma: float = Field(0.05, ge=0.0)
    p_range: Optional[Tuple[float, float]] = None

    @field_validator("p_range")
    @classmethod
    def _ordered(cls, v):
        if v is not None and not v[1] > v[0]:
            raise ValueError(f"p_range must be increasing, got {list(v)}")
        return v


class FidelitySpec(_Strict):
    kind: SolverKind
    mesh: Dict[str, Any] = Field(default_factory=dict)


class FidelityConfig(_Strict):
    low: FidelitySpec
    medium: Optional[FidelitySpec] = None
    high: FidelitySpec


class UQConfig(_Strict):
    M: int = Field(200, ge=1)
    N: int = Field(100, ge=1)
    k_max: int = Field(20, ge=1)
    tol: float = Field(0.0, ge=0.0)
    seed: int = Field(default_factory=lambda: settings.default_seed, ge=0)
    bound_k: Optional[int] = Field(None, ge=1)
    bound_samples: int = Field(50, ge=1)
    c1: float = Field(1.0, ge=0.0)
    c2: float = Field(1.0, ge=0.0)

    @model_validator(mode="after")
    def _sizes(self):
        if self.k_max > self.M:
            raise ValueError(f"k_max={self.k_max} exceeds the training set size M={self.M}")
        if self.bound_k is not None and self.bound_k >= self.k_max:
            raise ValueError(f"bound_k={self.bound_k} must be below k_max={self.k_max}")
        return self


class SCConfig(_Strict):
    n_c: List[int] = Field(default_factory=lambda: [8, 16, 32, 64, 128])
    n_ref: int = Field(256, ge=1)

    @model_validator(mode="after")
    def _reference_is_finest(self):
        if not self.n_c or min(self.n_c) < 1:
            raise ValueError("n_c must be a nonempty list of positive node counts")
        if self.n_ref < max(self.n_c):
            raise ValueError(f"n_ref={self.n_ref} must be at least max(n_c)={max(self.n_c)}")
        return self


class DiagnoseConfig(_Strict):
    eps: List[FractionFloat] = Field(default_factory=lambda: [0.1, 0.05, 0.025])
    dz: float = Field(1e-4, gt=0.0, lt=0.01)

    @field_validator("eps")
    @classmethod
    def _in_range(cls, v):
        if not v or any(not 0.0 < e <= 1.0 for e in v):
            raise ValueError("diagnose.eps must be a nonempty list of values in (0, 1]")
        return v


class OutputsConfig(_Strict):
    dir: str = Field(default_factory=lambda: settings.output_dir)


class ExperimentConfig(_Strict):
    problem: ProblemConfig
    fidelity: FidelityConfig
    uq: UQConfig = Field(default_factory=UQConfig)
    sc: Optional[SCConfig] = None
    diagnose: Optional[DiagnoseConfig] = None
    outputs: OutputsConfig = Field(default_factory=OutputsConfig)

    def fidelities(self) -> Dict[str, FidelitySpec]:
        out = {"low": self.fidelity.low, "high": self.fidelity.high}
        if self.fidelity.medium is not None:
            out["medium"] = self.fidelity.medium
        return out
