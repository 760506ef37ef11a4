"""
multifidelity/galerkin.py
Gramian of the selected basis and Galerkin coefficient inference G c = g.
"""
import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import linalg

from config.settings import settings
from ..errors import DomainError, SingularMatrixError
from .snapshots import SnapshotMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GalerkinSystem:
    gram: np.ndarray            # K x K, all selected basis vectors
    chol: np.ndarray            # lower factor of the active block
    lambda_min: float           # smallest eigenvalue of the active block
    active: Tuple[int, ...]     # positions kept after pivot truncation
    ip_weight: float

    @property
    def k(self) -> int:
        return self.gram.shape[0]


def gram_matrix(basis: np.ndarray, ip_weight: float) -> np.ndarray:
    g = ip_weight * (basis.T @ basis)
    return 0.5 * (g + g.T)


def assemble_gramian(snap: SnapshotMatrix, indices: Sequence[int]) -> GalerkinSystem:
    """
    Cholesky of G in the given basis order; a basis vector whose pivot falls
    below gram_truncation * max(diag G) is dropped from the active set.
    """
    idx = list(indices)
    if len(set(idx)) != len(idx) or any(not 0 <= i < snap.count for i in idx):
        raise DomainError(f"invalid basis indices {idx} for {snap.count} snapshots")
    basis = snap.columns[:, idx]
    gram = gram_matrix(basis, snap.ip_weight)
    cutoff = settings.gram_truncation * (gram.diagonal().max() if idx else 0.0)

    active = []
    factor = np.zeros((0, 0))
    for i in range(len(idx)):
        if active:
            row = linalg.solve_triangular(factor, gram[active, i], lower=True)
        else:
            row = np.zeros(0)
        pivot = gram[i, i] - row @ row
        if not pivot > cutoff or not cutoff > 0:
            logger.debug("[Galerkin] dropped basis %d (pivot %.3e)", i, pivot)
            continue
        grown = np.zeros((len(active) + 1, len(active) + 1))
        grown[:-1, :-1] = factor
        grown[-1, :-1] = row
        grown[-1, -1] = np.sqrt(pivot)
        factor = grown
        active.append(i)

    if not active:
        raise SingularMatrixError("Gramian has no active basis vector (all snapshots vanish)")
    block = gram[np.ix_(active, active)]
    lambda_min = float(linalg.eigh(block, eigvals_only=True)[0])
    if len(active) < len(idx):
        logger.info("[Galerkin] %d of %d basis vectors active", len(active), len(idx))
    return GalerkinSystem(gram, factor, lambda_min, tuple(active), snap.ip_weight)


def infer_coefficients(sys: GalerkinSystem, basis: np.ndarray, u: np.ndarray) -> np.ndarray:
    """c with G c = g on the active block, g_k = <u, basis_k>; inactive entries are 0."""
    basis = np.asarray(basis, dtype=float)
    u = np.asarray(u, dtype=float)
    if basis.ndim != 2 or basis.shape[1] != sys.k:
        raise DomainError(f"basis must have {sys.k} columns, got shape {basis.shape}")
    if u.shape != (basis.shape[0],):
        raise DomainError(f"query vector has shape {u.shape}, basis rows are {basis.shape[0]}")
    active = list(sys.active)
    g = sys.ip_weight * (basis[:, active].T @ u)
    coeffs = np.zeros(sys.k)
    coeffs[active] = linalg.cho_solve((sys.chol, True), g)
    return coeffs
