"""
metrics/bounds.py
Computable relative error bound for a surrogate built from k selected points:

    bound(z*) = d^Y(u^Y(z*), U^Y(gamma_k)) / ||u^Y(z*)|| * (c1 + c2 * R_e(z_{k+1}))

    R_e(z) = ||P_{U^H(gamma_k)} u^H(z) - u^F(z)|| / d^H(u^H(z), U^H(gamma_k))

Y is the inference fidelity. z_{k+1} is the (k+1)-th selected point, whose
high-fidelity snapshot already exists in the pipeline, so no extra high run
is needed. Norms and projections use the weighted L2 inner product.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence

import numpy as np
import pandas as pd

from ..core.fields import ObservablePair, RandomSample
from ..core.grid import discrete_l2_norm
from ..errors import DegenerateBoundError, DomainError
from ..multifidelity.galerkin import assemble_gramian, infer_coefficients
from ..multifidelity.pipeline import OBSERVABLES, SurrogatePipeline

logger = logging.getLogger(__name__)

DEGENERATE_DISTANCE = 1e-14
BOUND_COLUMNS = ["k", "err_rho", "err_current", "bound_rho", "bound_current", "coverage"]


@dataclass(frozen=True)
class BoundReport:
    bound_rho: float
    bound_current: float
    coverage: Optional[float] = None

    def __post_init__(self):
        if self.coverage is not None and not 0.0 <= self.coverage <= 1.0:
            raise DomainError(f"coverage must lie in [0, 1], got {self.coverage}")


def _projection(system, basis: np.ndarray, u: np.ndarray) -> np.ndarray:
    return basis @ infer_coefficients(system, basis, u)


class BoundEstimator:
    """Bound machinery for the k-point prefix of a pipeline; reusable across z*."""

    def __init__(self, pipe: SurrogatePipeline, k: int, c1: float = 1.0, c2: float = 1.0):
        if not 1 <= k < pipe.k:
            raise DomainError(f"bound needs 1 <= k < K={pipe.k} selected points, got k={k}")
        self.k = k
        self.sub = pipe.truncated(k)
        self.factor: Dict[str, float] = {}
        for q in OBSERVABLES:
            high = self.sub.high_snapshots[q]
            u_next = pipe.high_snapshots[q].column(k)
            high_sys = assemble_gramian(high, range(k))
            projected = _projection(high_sys, high.columns, u_next)
            d_high = discrete_l2_norm(u_next - projected, high.ip_weight)
            if d_high < DEGENERATE_DISTANCE:
                raise DegenerateBoundError(
                    f"high-fidelity distance of point {k + 1} to the first {k} is {d_high:.3e} for '{q}'"
                )
            y_next = pipe.inference[q].column(k)
            coeffs = infer_coefficients(self.sub.systems[q], self.sub.inference[q].columns, y_next)
            surrogate = high.columns @ coeffs
            r_e = discrete_l2_norm(projected - surrogate, high.ip_weight) / d_high
            self.factor[q] = c1 + c2 * r_e
            logger.debug("[Bound] k=%d %s: R_e=%.3e", k, q, r_e)

    def estimate(self, pair: ObservablePair) -> Dict[str, float]:
        out = {}
        for q in OBSERVABLES:
            snap = self.sub.inference[q]
            u = getattr(pair, q)
            norm = discrete_l2_norm(u, snap.ip_weight)
            if norm == 0.0:
                out[q] = 0.0
                continue
            dist = discrete_l2_norm(u - _projection(self.sub.systems[q], snap.columns, u), snap.ip_weight)
            out[q] = dist / norm * self.factor[q]
        return out


def empirical_bound(
    pipe: SurrogatePipeline,
    z_star: Optional[RandomSample],
    k: int,
    c1: float = 1.0,
    c2: float = 1.0,
    inference_pair: Optional[ObservablePair] = None,
) -> BoundReport:
    """Bound at one z*. Pass `inference_pair` to reuse an inference-model run at z*."""
    if inference_pair is None:
        if z_star is None or pipe.inference_model is None:
            raise DomainError("need either z_star with an attached inference model or inference_pair")
        inference_pair = pipe.inference_model.evaluate(z_star)
    b = BoundEstimator(pipe, k, c1, c2).estimate(inference_pair)
    return BoundReport(b["rho"], b["current"])


def relative_error(ref: np.ndarray, approx: np.ndarray, h: float) -> float:
    norm = discrete_l2_norm(ref, h)
    diff = discrete_l2_norm(ref - approx, h)
    return diff / norm if norm > 0 else diff


def bound_curve(
    pipe: SurrogatePipeline,
    high_pairs: Sequence[ObservablePair],
    inference_pairs: Sequence[ObservablePair],
    k_values: Optional[Iterable[int]] = None,
    c1: float = 1.0,
    c2: float = 1.0,
) -> pd.DataFrame:
    """
    Mean true relative error and mean bound per k over a test set, with the
    fraction of test points where the bound holds for both rho and J.
    """
    if len(high_pairs) != len(inference_pairs) or not high_pairs:
        raise DomainError("bound sweep needs matching, nonempty high and inference evaluations")
    ks = list(k_values) if k_values is not None else list(range(1, pipe.k))
    h = pipe.high_grid.h
    rows = []
    for k in ks:
        est = BoundEstimator(pipe, k, c1, c2)
        errs = {q: [] for q in OBSERVABLES}
        bounds = {q: [] for q in OBSERVABLES}
        for ref, inf in zip(high_pairs, inference_pairs):
            surrogate = est.sub.combine(inf)
            b = est.estimate(inf)
            for q in OBSERVABLES:
                errs[q].append(relative_error(getattr(ref, q), getattr(surrogate, q), h))
                bounds[q].append(b[q])
        held = np.ones(len(high_pairs), dtype=bool)
        for q in OBSERVABLES:
            held &= np.asarray(bounds[q]) >= np.asarray(errs[q])
        rows.append({
            "k": k,
            "err_rho": float(np.mean(errs["rho"])),
            "err_current": float(np.mean(errs["current"])),
            "bound_rho": float(np.mean(bounds["rho"])),
            "bound_current": float(np.mean(bounds["current"])),
            "coverage": float(held.mean()),
        })
        logger.info("[Bound] k=%d coverage=%.2f", k, rows[-1]["coverage"])
    return pd.DataFrame(rows, columns=BOUND_COLUMNS)
