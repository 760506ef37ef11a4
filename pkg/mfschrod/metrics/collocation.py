"""
metrics/collocation.py
Stochastic-collocation baseline in one random dimension: Gauss-Legendre
mean estimates and their convergence table against a fine reference rule.
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.polynomial import legendre

from ..core.fields import ObservablePair, RandomSample
from ..errors import DomainError
from ..multifidelity.snapshots import FidelityModel, evaluate_model

logger = logging.getLogger(__name__)

SC_COLUMNS = ["n_c", "err_rho", "err_current"]


def gauss_legendre_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes on [-1, 1] and weights normalized to the uniform density (sum to 1)."""
    if n < 1:
        raise DomainError(f"quadrature needs at least one node, got n={n}")
    nodes, weights = legendre.leggauss(n)
    return nodes, weights / 2.0


def _require_scalar_dimension(model: FidelityModel):
    d = getattr(model, "d", 1)
    if d != 1:
        raise DomainError(f"stochastic collocation is one-dimensional here, model has d={d}")


def weighted_mean(pairs: Sequence[ObservablePair], weights: np.ndarray) -> ObservablePair:
    rho = sum(w * p.rho for w, p in zip(weights, pairs))
    current = sum(w * p.current for w, p in zip(weights, pairs))
    return ObservablePair(pairs[0].grid, rho, current, check_density=False)


def sc_mean_estimate(model: FidelityModel, n_c: int, threads: Optional[int] = None) -> ObservablePair:
    _require_scalar_dimension(model)
    nodes, weights = gauss_legendre_rule(n_c)
    pairs, _ = evaluate_model(model, [RandomSample([z]) for z in nodes], threads, desc=f"[SC] N_c={n_c}")
    return weighted_mean(pairs, weights)


def sc_error_table(
    model: FidelityModel,
    n_c_list: Sequence[int],
    n_ref: int,
    threads: Optional[int] = None,
) -> pd.DataFrame:
    """Unweighted Euclidean norm of mean(N_c) - mean(N_ref) per quantity."""
    if not n_c_list:
        raise DomainError("n_c_list is empty")
    if n_ref < max(n_c_list):
        raise DomainError(f"n_ref={n_ref} must be at least max(n_c_list)={max(n_c_list)}")
    reference = sc_mean_estimate(model, n_ref, threads)
    rows = []
    for n_c in n_c_list:
        mean = reference if n_c == n_ref else sc_mean_estimate(model, n_c, threads)
        rows.append({
            "n_c": int(n_c),
            "err_rho": float(np.linalg.norm(mean.rho - reference.rho)),
            "err_current": float(np.linalg.norm(mean.current - reference.current)),
        })
        logger.info("[SC] N_c=%d err_rho=%.3e", n_c, rows[-1]["err_rho"])
    return pd.DataFrame(rows, columns=SC_COLUMNS)
