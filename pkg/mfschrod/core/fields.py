"""
core/fields.py
Wavefunctions, observables, random samples, WKB data and potentials.

Every type here is immutable after construction: arrays are copied and
flagged read-only, so instances can be shared across worker threads.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import DomainError
from .grid import SpatialGrid1D, spectral_derivative

# (x, z) -> values at x; x is an array, z the random vector
FieldFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _frozen(arr, dtype) -> np.ndarray:
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class RandomSample:
    """A point of the random space [-1, 1]^d."""
    z: np.ndarray

    def __post_init__(self):
        z = _frozen(np.atleast_1d(self.z), float)
        if z.ndim != 1 or z.size == 0:
            raise DomainError("random sample must be a nonempty vector")
        if not np.all(np.isfinite(z)) or np.any(np.abs(z) > 1.0):
            raise DomainError(f"random sample components must lie in [-1, 1], got {z}")
        object.__setattr__(self, "z", z)

    @property
    def d(self) -> int:
        return self.z.size

    def __eq__(self, other) -> bool:
        return isinstance(other, RandomSample) and np.array_equal(self.z, other.z)

    def __hash__(self) -> int:
        return hash(self.z.tobytes())


@dataclass(frozen=True, eq=False)
class WaveField:
    grid: SpatialGrid1D
    eps: float
    t: float
    values: np.ndarray

    def __post_init__(self):
        if not (0.0 < self.eps <= 1.0):
            raise DomainError(f"semiclassical parameter must lie in (0, 1], got eps={self.eps}")
        values = _frozen(self.values, complex)
        if values.shape != (self.grid.n,):
            raise DomainError(f"wave values have shape {values.shape}, grid expects ({self.grid.n},)")
        if not np.all(np.isfinite(values)):
            raise DomainError("wave values must be finite")
        object.__setattr__(self, "values", values)

    def with_values(self, values: np.ndarray, t: float) -> "WaveField":
        return WaveField(self.grid, self.eps, t, values)


@dataclass(frozen=True, eq=False)
class ObservablePair:
    """Position density rho and current density J on a grid.

    `check_density=False` is used for level-set moments and surrogate outputs,
    which are linear combinations and may dip slightly below zero in the tails.
    """
    grid: SpatialGrid1D
    rho: np.ndarray
    current: np.ndarray
    check_density: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        rho = _frozen(self.rho, float)
        current = _frozen(self.current, float)
        n = self.grid.n
        if rho.shape != (n,) or current.shape != (n,):
            raise DomainError(f"observables must have shape ({n},), got {rho.shape} and {current.shape}")
        if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(current))):
            raise DomainError("observables must be finite")
        if self.check_density and rho.size and rho.min() < -1e-12:
            j = int(np.argmin(rho))
            raise DomainError(f"negative density {rho[j]:.3e} at node {j}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "current", current)

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.rho, self.current])


@dataclass(frozen=True)
class WkbData:
    """Initial data sqrt(n0) * exp(i S0 / eps).

    ds0 is the analytic phase gradient when known; solvers that need it fall
    back to spectral differentiation of S0 samples otherwise.
    """
    n0: FieldFn
    s0: FieldFn
    ds0: Optional[FieldFn] = None

    def phase_gradient(self, grid: SpatialGrid1D, z: np.ndarray) -> np.ndarray:
        if self.ds0 is not None:
            return np.broadcast_to(np.asarray(self.ds0(grid.x, z), dtype=float), grid.x.shape).copy()
        s = np.broadcast_to(np.asarray(self.s0(grid.x, z), dtype=float), grid.x.shape)
        return spectral_derivative(s, grid)


@dataclass(frozen=True)
class PotentialFn:
    """V(x, z) together with its x-derivatives.

    gradient and hessian are needed by the FGA trajectories and the
    level-set advection speed; TSFP only uses the value.
    """
    value: FieldFn
    gradient: Optional[FieldFn] = None
    hessian: Optional[FieldFn] = None

    def v(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.value(x, z), dtype=float), np.shape(x))

    def dv(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        if self.gradient is None:
            raise DomainError("potential has no gradient; FGA and level-set solvers need one")
        return np.broadcast_to(np.asarray(self.gradient(x, z), dtype=float), np.shape(x))

    def d2v(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        if self.hessian is None:
            raise DomainError("potential has no Hessian; the FGA amplitude equation needs one")
        return np.broadcast_to(np.asarray(self.hessian(x, z), dtype=float), np.shape(x))


def constant_potential(c: float) -> PotentialFn:
    return PotentialFn(
        value=lambda x, z: np.full(np.shape(x), float(c)),
        gradient=lambda x, z: np.zeros(np.shape(x)),
        hessian=lambda x, z: np.zeros(np.shape(x)),
    )


def harmonic_potential(omega: float = 1.0) -> PotentialFn:
    w2 = omega * omega
    return PotentialFn(
        value=lambda x, z: 0.5 * w2 * np.asarray(x) ** 2,
        gradient=lambda x, z: w2 * np.asarray(x, dtype=float),
        hessian=lambda x, z: np.full(np.shape(x), w2),
    )


# ── Operations ────────────────────────────────────────────────────
def wkb_initial(data: WkbData, z: RandomSample, eps: float, grid: SpatialGrid1D) -> WaveField:
    """values[j] = sqrt(n0(x_j, z)) * exp(i S0(x_j, z) / eps), t = 0."""
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    x = grid.x
    n0 = np.broadcast_to(np.asarray(data.n0(x, z.z), dtype=float), x.shape)
    bad = np.flatnonzero(~(n0 >= 0))
    if bad.size:
        j = int(bad[0])
        raise DomainError(f"initial density n0={n0[j]:.3e} is negative at node {j} (x={x[j]:.6g})")
    s0 = np.broadcast_to(np.asarray(data.s0(x, z.z), dtype=float), x.shape)
    return WaveField(grid, eps, 0.0, np.sqrt(n0) * np.exp(1j * s0 / eps))


def observables_from_wave(field: WaveField) -> ObservablePair:
    """rho = |psi|^2, J = eps * Im(conj(psi) * d_x psi) with the spectral derivative."""
    psi = field.values
    dpsi = spectral_derivative(psi, field.grid)
    rho = np.abs(psi) ** 2
    current = field.eps * np.imag(np.conj(psi) * dpsi)
    return ObservablePair(field.grid, rho, current)
