"""
multifidelity/pipeline.py
Offline construction and online evaluation of the bi-/tri-fidelity surrogate.

Offline:
  1. evaluate the low model on the training set
  2. greedy selection of gamma_K on the stacked (rho, J) low snapshots
  3. evaluate the inference model (low, or medium in tri mode) and the
     high model at gamma_K only
  4. one Gramian per quantity from the inference snapshots at gamma_K
Online:
  evaluate the inference model at z, Galerkin coefficients per quantity,
  surrogate = sum_k c_k U^H(z_{i_k}).
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.fields import ObservablePair, RandomSample
from ..core.grid import SpatialGrid1D
from ..errors import DomainError
from .galerkin import GalerkinSystem, assemble_gramian, infer_coefficients
from .greedy import SelectionResult, greedy_select
from .snapshots import (
    CURRENT, RHO, STACKED, FidelityModel, SnapshotMatrix, evaluate_model, snapshots_from_pairs,
)

logger = logging.getLogger(__name__)

BIFIDELITY = "bifidelity"
TRIFIDELITY = "trifidelity"
OBSERVABLES = (RHO, CURRENT)


@dataclass(frozen=True, eq=False)
class SurrogatePipeline:
    """
    Immutable once built; concurrent `evaluate` calls are safe.

    `inference` and `high_snapshots` hold one SnapshotMatrix per observable
    whose columns are ordered like `selection.indices`.
    """
    low: Optional[FidelityModel]
    medium: Optional[FidelityModel]
    high: Optional[FidelityModel]
    selection: SelectionResult
    samples: Tuple[RandomSample, ...]
    inference: Dict[str, SnapshotMatrix]
    high_snapshots: Dict[str, SnapshotMatrix]
    systems: Dict[str, GalerkinSystem]
    mode: str
    high_grid: SpatialGrid1D
    timings: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in (BIFIDELITY, TRIFIDELITY):
            raise DomainError(f"unknown surrogate mode '{self.mode}'")
        if self.mode == TRIFIDELITY and self.medium is None and self.low is not None:
            raise DomainError("trifidelity mode needs a medium-fidelity model")
        k = self.selection.k
        for q in OBSERVABLES:
            if self.high_snapshots[q].count != k or self.inference[q].count != k:
                raise DomainError(f"expected {k} snapshots per observable for '{q}'")

    @property
    def k(self) -> int:
        return self.selection.k

    @property
    def inference_model(self) -> Optional[FidelityModel]:
        return self.medium if self.mode == TRIFIDELITY else self.low

    def truncated(self, r: int) -> "SurrogatePipeline":
        """Surrogate built from the first r selected points only."""
        if r == self.k:
            return self
        positions = range(r)
        inference = {q: self.inference[q].subset(positions) for q in OBSERVABLES}
        high = {q: self.high_snapshots[q].subset(positions) for q in OBSERVABLES}
        systems = {q: assemble_gramian(inference[q], positions) for q in OBSERVABLES}
        return replace(
            self,
            selection=self.selection.prefix(r),
            samples=self.samples[:r],
            inference=inference,
            high_snapshots=high,
            systems=systems,
        )

    def coefficients(self, pair: ObservablePair) -> Dict[str, np.ndarray]:
        return {
            q: infer_coefficients(self.systems[q], self.inference[q].columns, getattr(pair, q))
            for q in OBSERVABLES
        }

    def combine(self, pair: ObservablePair) -> ObservablePair:
        """Surrogate from an already computed inference-model evaluation."""
        coeffs = self.coefficients(pair)
        rho = self.high_snapshots[RHO].columns @ coeffs[RHO]
        current = self.high_snapshots[CURRENT].columns @ coeffs[CURRENT]
        return ObservablePair(self.high_grid, rho, current, check_density=False)


def surrogate_evaluate(pipe: SurrogatePipeline, z: RandomSample) -> ObservablePair:
    model = pipe.inference_model
    if model is None:
        raise DomainError("pipeline has no inference model attached")
    return pipe.combine(model.evaluate(z))


def _per_observable(pairs: Sequence[ObservablePair], samples) -> Dict[str, SnapshotMatrix]:
    return {q: snapshots_from_pairs(pairs, samples, q) for q in OBSERVABLES}


def _check_dimensions(*models):
    dims = {getattr(m, "d", None) for m in models if m is not None}
    if len(dims) > 1:
        raise DomainError(f"models disagree on the random dimension: {sorted(dims)}")


def offline_build(
    low: FidelityModel,
    medium: Optional[FidelityModel],
    high: FidelityModel,
    training: Sequence[RandomSample],
    k_max: int,
    tol: float = 0.0,
    threads: Optional[int] = None,
    low_pairs: Optional[List[ObservablePair]] = None,
) -> SurrogatePipeline:
    """
    `low_pairs` may carry precomputed low-model observables for `training`
    (e.g. shared between a bi- and a tri-fidelity build).
    """
    _check_dimensions(low, medium, high)
    if not training:
        raise DomainError("training set is empty")
    timings: Dict[str, float] = {}

    if low_pairs is None:
        low_pairs, seconds = evaluate_model(low, training, threads, desc="[Offline] low")
        timings["low"] = seconds / len(training)
    low_snap = snapshots_from_pairs(low_pairs, training, STACKED)
    selection = greedy_select(low_snap, min(k_max, len(training)), tol)
    gamma = [training[i] for i in selection.indices]

    if medium is not None:
        inference_pairs, seconds = evaluate_model(medium, gamma, threads, desc="[Offline] medium")
        timings["medium"] = seconds / len(gamma)
        mode = TRIFIDELITY
    else:
        inference_pairs = [low_pairs[i] for i in selection.indices]
        mode = BIFIDELITY

    high_pairs, seconds = evaluate_model(high, gamma, threads, desc="[Offline] high")
    timings["high"] = seconds / len(gamma)

    inference = _per_observable(inference_pairs, gamma)
    high_snaps = _per_observable(high_pairs, gamma)
    systems = {q: assemble_gramian(inference[q], range(len(gamma))) for q in OBSERVABLES}
    logger.info(
        "[Offline] %s surrogate with K=%d (lambda_min rho=%.3e, J=%.3e)",
        mode, len(gamma), systems[RHO].lambda_min, systems[CURRENT].lambda_min,
    )
    return SurrogatePipeline(
        low=low, medium=medium, high=high,
        selection=selection, samples=tuple(gamma),
        inference=inference, high_snapshots=high_snaps, systems=systems,
        mode=mode, high_grid=high_pairs[0].grid, timings=timings,
    )
