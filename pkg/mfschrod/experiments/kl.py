"""
experiments/kl.py
Karhunen-Loeve modes of the squared-exponential covariance

    c(x - y) = sigma^2 exp(-|x - y|^2 / l^2)

by the Nystrom method: Gauss-Legendre nodes y_j and weights w_j on the
domain, symmetric eigenproblem for W^(1/2) C W^(1/2), phi_k(y_j) = h_jk / sqrt(w_j).
Off the nodes: phi_k(x) = (1 / lambda_k) sum_j w_j c(x - y_j) phi_k(y_j).
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.polynomial import legendre
from scipy import linalg

from ..errors import DomainError

NEGATIVE_EIGENVALUE_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class KLField:
    l: float
    sigma: float
    eigvals: np.ndarray        # (d1,), descending
    eigfuncs: np.ndarray       # (d1, nq), values at the quadrature nodes
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def d1(self) -> int:
        return self.eigvals.size

    def covariance(self, x, y) -> np.ndarray:
        r = np.subtract.outer(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return self.sigma ** 2 * np.exp(-(r ** 2) / self.l ** 2)

    def _kernel_sums(self, kernel: np.ndarray) -> np.ndarray:
        # kernel: (len(x), nq) -> sqrt(lambda_k) phi_k(x), shape (d1, len(x))
        projected = (kernel * self.weights[None, :]) @ self.eigfuncs.T      # (len(x), d1)
        scale = np.zeros_like(self.eigvals)
        positive = self.eigvals > 0
        scale[positive] = 1.0 / np.sqrt(self.eigvals[positive])
        return (projected * scale[None, :]).T

    def scaled_modes(self, x) -> np.ndarray:
        """sqrt(lambda_k) * phi_k(x) for every mode; zero modes give zeros."""
        return self._kernel_sums(self.covariance(x, self.nodes))

    def scaled_mode_derivatives(self, x) -> np.ndarray:
        r = np.subtract.outer(np.asarray(x, dtype=float), self.nodes)
        return self._kernel_sums(-2.0 * r / self.l ** 2 * self.covariance(x, self.nodes))


def kl_eigenpairs(l: float, sigma: float, d1: int, nq: int, domain: Tuple[float, float]) -> KLField:
    a, b = domain
    if not l > 0 or sigma < 0:
        raise DomainError(f"need l > 0 and sigma >= 0, got l={l}, sigma={sigma}")
    if d1 < 1 or nq < 8 * d1:
        raise DomainError(f"need d1 >= 1 and nq >= 8*d1, got d1={d1}, nq={nq}")
    if not b > a:
        raise DomainError(f"empty domain ({a}, {b})")

    xi, w = legendre.leggauss(nq)
    half = 0.5 * (b - a)
    nodes = half * xi + 0.5 * (a + b)
    weights = half * w
    root_w = np.sqrt(weights)

    r = np.subtract.outer(nodes, nodes)
    cov = sigma ** 2 * np.exp(-(r ** 2) / l ** 2)
    sym = root_w[:, None] * cov * root_w[None, :]
    vals, vecs = linalg.eigh(sym)
    if vals.size and vals[0] < -NEGATIVE_EIGENVALUE_TOLERANCE:
        raise DomainError(f"covariance matrix is not positive semidefinite (eigenvalue {vals[0]:.3e})")

    order = np.argsort(vals)[::-1][:d1]
    eigvals = np.clip(vals[order], 0.0, None)
    funcs = (vecs[:, order] / root_w[:, None]).T
    # sign: largest-magnitude nodal value positive
    peaks = funcs[np.arange(d1), np.argmax(np.abs(funcs), axis=1)]
    funcs *= np.where(peaks < 0, -1.0, 1.0)[:, None]
    return KLField(l, sigma, eigvals, funcs, nodes, weights)
