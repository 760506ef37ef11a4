"""
multifidelity/snapshots.py
Model evaluation over sample sets and the snapshot matrices built from it.

A fidelity model is anything with `name`, `grid`, `d` and
`evaluate(z) -> ObservablePair`. Sweeps run on a joblib thread pool; joblib
returns results in submission order, so column j always belongs to sample j.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Protocol, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from config.settings import settings
from ..core.fields import ObservablePair, RandomSample
from ..core.grid import SpatialGrid1D, discrete_l2_norm
from ..errors import DomainError, ModelEvaluationError

logger = logging.getLogger(__name__)

RHO = "rho"
CURRENT = "current"
STACKED = "stacked"
QUANTITIES = (RHO, CURRENT, STACKED)


class FidelityModel(Protocol):
    name: str
    grid: SpatialGrid1D
    d: int

    def evaluate(self, z: RandomSample) -> ObservablePair:
        ...


@dataclass(frozen=True, eq=False)
class SnapshotMatrix:
    """Columns U(z_j) as an (n_dof, M) array, plus the samples they came from."""
    columns: np.ndarray
    samples: Tuple[RandomSample, ...]
    ip_weight: float
    scales: Optional[Dict[str, float]] = field(default=None, repr=False)

    def __post_init__(self):
        cols = np.array(self.columns, dtype=float, copy=True)
        if cols.ndim != 2:
            raise DomainError(f"snapshot columns must form a 2-D array, got shape {cols.shape}")
        if cols.shape[1] < 1 or cols.shape[1] != len(self.samples):
            raise DomainError(f"{cols.shape[1]} columns for {len(self.samples)} samples")
        if not self.ip_weight > 0:
            raise DomainError(f"inner-product weight must be positive, got {self.ip_weight}")
        cols.setflags(write=False)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "samples", tuple(self.samples))

    @property
    def count(self) -> int:
        return self.columns.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.columns[:, j]

    def subset(self, indices: Sequence[int]) -> "SnapshotMatrix":
        idx = list(indices)
        return SnapshotMatrix(self.columns[:, idx], [self.samples[i] for i in idx], self.ip_weight, self.scales)


def _timed_evaluate(model: FidelityModel, index: int, z: RandomSample):
    start = time.perf_counter()
    try:
        pair = model.evaluate(z)
    except Exception as exc:
        raise ModelEvaluationError(index, z.z, exc) from exc
    return pair, time.perf_counter() - start


def evaluate_model(
    model: FidelityModel,
    samples: Sequence[RandomSample],
    threads: Optional[int] = None,
    desc: Optional[str] = None,
) -> Tuple[List[ObservablePair], float]:
    """Evaluate `model` at every sample. Returns (pairs, total seconds of model time)."""
    if not samples:
        raise DomainError("cannot evaluate a model on an empty sample set")
    n_jobs = threads or settings.threads
    label = desc or f"[{getattr(model, 'name', 'model')}]"
    jobs = (delayed(_timed_evaluate)(model, j, z) for j, z in enumerate(samples))
    # results stream back in submission order; the bar ticks once per finished evaluation
    stream = Parallel(n_jobs=n_jobs, prefer="threads", return_as="generator")(jobs)
    results = list(tqdm(stream, total=len(samples), desc=label, disable=not settings.progress, leave=False))
    pairs = [r[0] for r in results]
    seconds = float(sum(r[1] for r in results))
    logger.info("[Snapshots] %s: %d evaluations, %.2fs model time", label, len(pairs), seconds)
    return pairs, seconds


def quantity_scales(pairs: Sequence[ObservablePair]) -> Dict[str, float]:
    """Training-max L2 norms of rho and J; a vanishing quantity gets scale 1."""
    h = pairs[0].grid.h
    scales = {}
    for q in (RHO, CURRENT):
        peak = max(discrete_l2_norm(getattr(p, q), h) for p in pairs)
        scales[q] = peak if peak > 0 else 1.0
    return scales


def snapshots_from_pairs(
    pairs: Sequence[ObservablePair],
    samples: Sequence[RandomSample],
    quantity: str,
    scales: Optional[Dict[str, float]] = None,
) -> SnapshotMatrix:
    if quantity not in QUANTITIES:
        raise DomainError(f"unknown quantity '{quantity}', expected one of {QUANTITIES}")
    if not pairs:
        raise DomainError("no observables to build snapshots from")
    h = pairs[0].grid.h
    if quantity == STACKED:
        scales = scales or quantity_scales(pairs)
        cols = [np.concatenate([p.rho / scales[RHO], p.current / scales[CURRENT]]) for p in pairs]
    else:
        cols = [getattr(p, quantity) for p in pairs]
    return SnapshotMatrix(np.column_stack(cols), list(samples), h, scales)


def build_snapshots(
    model: FidelityModel,
    samples: Sequence[RandomSample],
    quantity: str,
    threads: Optional[int] = None,
) -> SnapshotMatrix:
    pairs, _ = evaluate_model(model, samples, threads)
    return snapshots_from_pairs(pairs, samples, quantity)
