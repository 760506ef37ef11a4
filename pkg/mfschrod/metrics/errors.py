"""
metrics/errors.py
Mean L2 error over a sample set:

    E = (1/N) * sum_i (1/N_x) * sqrt(sum_j |ref_i[j] - approx_i[j]|^2)

1/N_x sits outside the square root; reported magnitudes depend on it.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from ..core.fields import ObservablePair
from ..errors import DomainError

ERROR_COLUMNS = ["k", "err_rho", "err_current"]


@dataclass(frozen=True)
class ErrorReport:
    err_rho: float
    err_current: float
    k_used: int
    per_sample: Optional[List[tuple]] = None

    def __post_init__(self):
        if self.err_rho < 0 or self.err_current < 0:
            raise DomainError("errors must be nonnegative")

    def as_row(self) -> dict:
        return {"k": self.k_used, "err_rho": self.err_rho, "err_current": self.err_current}


def _per_sample(ref_set, approx_set) -> np.ndarray:
    ref = [np.asarray(v) for v in ref_set]
    approx = [np.asarray(v) for v in approx_set]
    if len(ref) != len(approx):
        raise DomainError(f"sample counts differ: {len(ref)} reference vs {len(approx)} approximate")
    if not ref:
        raise DomainError("error metric needs at least one sample")
    n_x = ref[0].shape
    for i, (r, a) in enumerate(zip(ref, approx)):
        if r.shape != n_x or a.shape != n_x or r.ndim != 1:
            raise DomainError(f"sample {i}: vector shapes {r.shape} and {a.shape} do not match {n_x}")
    diff = np.stack(ref) - np.stack(approx)
    return np.sqrt(np.sum(np.abs(diff) ** 2, axis=1)) / n_x[0]


def mean_l2_error(ref_set: Sequence[np.ndarray], approx_set: Sequence[np.ndarray]) -> float:
    return float(np.mean(_per_sample(ref_set, approx_set)))


def error_report(
    ref_pairs: Sequence[ObservablePair],
    approx_pairs: Sequence[ObservablePair],
    k_used: int,
    keep_samples: bool = False,
) -> ErrorReport:
    rho = _per_sample([p.rho for p in ref_pairs], [p.rho for p in approx_pairs])
    cur = _per_sample([p.current for p in ref_pairs], [p.current for p in approx_pairs])
    per_sample = list(zip(rho.tolist(), cur.tolist())) if keep_samples else None
    return ErrorReport(float(rho.mean()), float(cur.mean()), k_used, per_sample)


STATISTICS_COLUMNS = [
    "x",
    "rho_high_mean", "rho_high_std", "rho_surrogate_mean", "rho_surrogate_std",
    "current_high_mean", "current_high_std", "current_surrogate_mean", "current_surrogate_std",
]


def solution_statistics(
    ref_pairs: Sequence[ObservablePair],
    approx_pairs: Sequence[ObservablePair],
) -> pd.DataFrame:
    """Pointwise mean and (population) standard deviation over the sample set."""
    if not ref_pairs or len(ref_pairs) != len(approx_pairs):
        raise DomainError("statistics need matching, nonempty reference and surrogate sets")
    cols = {"x": np.asarray(ref_pairs[0].grid.x)}
    for q in ("rho", "current"):
        for label, pairs in (("high", ref_pairs), ("surrogate", approx_pairs)):
            stack = np.stack([getattr(p, q) for p in pairs])
            cols[f"{q}_{label}_mean"] = stack.mean(axis=0)
            cols[f"{q}_{label}_std"] = stack.std(axis=0)
    return pd.DataFrame(cols, columns=STATISTICS_COLUMNS)
