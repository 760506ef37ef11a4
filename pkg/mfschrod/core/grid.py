"""
core/grid.py
Uniform periodic grids in x and the spectral derivative on them.

Node j sits at a + j*h for j = 0..n-1; x_n == x_0 is not stored.
Fourier mode l has wavenumber mu_l = 2*pi*l/(b-a), l = -n/2..n/2-1,
stored in FFT order (scipy.fft.fftfreq layout).
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import fft

from ..errors import DomainError


@dataclass(frozen=True)
class SpatialGrid1D:
    a: float
    b: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or self.b <= self.a:
            raise DomainError(f"grid needs finite a < b, got a={self.a}, b={self.b}")
        if int(self.n) != self.n or self.n <= 0 or self.n % 2:
            raise DomainError(f"grid cell count must be even and positive, got n={self.n}")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    @cached_property
    def x(self) -> np.ndarray:
        nodes = self.a + np.arange(self.n) * self.h
        nodes.setflags(write=False)
        return nodes

    @cached_property
    def mu(self) -> np.ndarray:
        """Wavenumbers in FFT order."""
        k = 2.0 * np.pi * fft.fftfreq(self.n, d=self.h)
        k.setflags(write=False)
        return k

    @classmethod
    def from_spacing(cls, a: float, b: float, h: float) -> "SpatialGrid1D":
        """Grid with spacing closest to h, rounded up to an even cell count."""
        n = int(np.ceil((b - a) / h))
        n += n % 2
        return cls(a, b, n)


def spectral_derivative(values: np.ndarray, grid: SpatialGrid1D) -> np.ndarray:
    """Exact derivative of the trigonometric interpolant of `values`."""
    coeffs = fft.fft(values)
    d = fft.ifft(1j * grid.mu * coeffs)
    if np.isrealobj(values):
        return d.real
    return d


def discrete_l2_norm(v: np.ndarray, h: float) -> float:
    """sqrt(h * sum |v_j|^2)."""
    if h <= 0:
        raise DomainError(f"quadrature weight must be positive, got h={h}")
    v = np.asarray(v)
    return float(np.sqrt(h * np.sum(np.abs(v) ** 2)))
