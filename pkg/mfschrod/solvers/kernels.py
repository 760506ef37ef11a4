"""
solvers/kernels.py
Compactly supported approximations of the Dirac delta for level-set moments.

Both kernels satisfy the discrete exact-integration identity
    sum_j delta_eta(x_j - x0) * h = 1      when eta = kappa * h, kappa integer.
"""
from dataclasses import dataclass

import numpy as np

from config.settings import settings
from ..errors import DomainError

PIECEWISE_LINEAR = "piecewise_linear"
COSINE = "cosine"
KERNEL_KINDS = (PIECEWISE_LINEAR, COSINE)


@dataclass(frozen=True)
class DeltaKernelSpec:
    kind: str
    eta: float

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise DomainError(f"unknown delta kernel '{self.kind}', expected one of {KERNEL_KINDS}")
        if not self.eta > 0:
            raise DomainError(f"kernel half-width must be positive, got eta={self.eta}")

    @classmethod
    def from_spacing(cls, kind: str, dp: float, kappa: int = None) -> "DeltaKernelSpec":
        kappa = settings.kernel_kappa if kappa is None else kappa
        if int(kappa) != kappa or kappa < 1:
            raise DomainError(f"kappa must be a positive integer, got {kappa}")
        return cls(kind, int(kappa) * dp)

    def is_multiple_of(self, dp: float) -> bool:
        ratio = self.eta / dp
        return abs(ratio - round(ratio)) <= 1e-9 * max(1.0, ratio) and round(ratio) >= 1


def delta_kernel(spec: DeltaKernelSpec, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    eta = spec.eta
    inside = np.abs(s) <= eta
    if spec.kind == PIECEWISE_LINEAR:
        values = (1.0 - np.abs(s) / eta) / eta
    else:
        values = (1.0 + np.cos(np.pi * s / eta)) / (2.0 * eta)
    return np.where(inside, values, 0.0)
