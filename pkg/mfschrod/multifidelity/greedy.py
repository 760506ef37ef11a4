"""
multifidelity/greedy.py
Greedy important-point selection by pivoted Cholesky on the snapshot Gramian.

At step k the pivot is the column farthest (weighted L2) from the span of the
k columns already chosen; its squared distance is the remaining diagonal of
the partially factored Gramian. Gramian columns are formed only for the
pivots, so the full M x M matrix is never built.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import DomainError
from .snapshots import SnapshotMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SelectionResult:
    """
    indices[k] is the (k+1)-th selected column. residuals[k] is the largest
    distance to the span of the first k selected columns, measured before
    pick k+1; a trailing residual below tol marks an early stop.
    """
    indices: Tuple[int, ...]
    residuals: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        object.__setattr__(self, "residuals", tuple(float(r) for r in self.residuals))
        if len(set(self.indices)) != len(self.indices):
            raise DomainError(f"selected indices are not distinct: {self.indices}")

    @property
    def k(self) -> int:
        return len(self.indices)

    def prefix(self, r: int) -> "SelectionResult":
        if not 1 <= r <= self.k:
            raise DomainError(f"prefix length must lie in [1, {self.k}], got {r}")
        return SelectionResult(self.indices[:r], self.residuals[:r])


def greedy_select(snap: SnapshotMatrix, k_max: int, tol: float = 0.0) -> SelectionResult:
    m = snap.count
    if not 1 <= k_max <= m:
        raise DomainError(f"k_max must lie in [1, {m}], got {k_max}")
    u = snap.columns
    w = snap.ip_weight

    remaining = w * np.einsum("ij,ij->j", u, u)      # squared distances to the current span
    factor = np.zeros((k_max, m))
    chosen = np.zeros(m, dtype=bool)
    floor = 0.5 * m * np.finfo(float).eps * remaining.max()

    indices, residuals = [], []
    for k in range(k_max):
        masked = np.where(chosen, -np.inf, remaining)
        j = int(np.argmax(masked))
        # remaining only shrinks, so dist never exceeds the previous residual
        dist = float(np.sqrt(max(masked[j], 0.0)))
        residuals.append(dist)
        if k > 0 and (dist < tol or masked[j] <= floor):
            logger.info("[Greedy] stopped at K=%d, residual %.3e", k, dist)
            break

        gram_col = w * (u.T @ u[:, j])
        row = gram_col - factor[:k].T @ factor[:k, j]
        pivot = np.sqrt(max(remaining[j], np.finfo(float).tiny))
        factor[k] = row / pivot
        remaining = remaining - factor[k] ** 2
        chosen[j] = True
        indices.append(j)
    else:
        logger.info("[Greedy] selected K=%d points, last residual %.3e", k_max, residuals[-1])

    return SelectionResult(tuple(indices), tuple(residuals))
