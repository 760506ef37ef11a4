"""
metrics/diagnostics.py
Growth of the density's z-derivative with 1/eps.

||d rho / dz|| is estimated by centered differences at Gauss-Legendre nodes:
    ||rho_z||^2 ~= sum_m w_m * h * sum_j ((rho(z_m + dz) - rho(z_m - dz)) / (2 dz))_j^2
"""
import logging
from typing import Callable, List, Optional, Sequence

import numpy as np

from ..core.fields import RandomSample
from ..errors import DomainError
from ..multifidelity.snapshots import FidelityModel, evaluate_model
from .collocation import gauss_legendre_rule

logger = logging.getLogger(__name__)

DIAGNOSTIC_NODES = 20


def rho_z_norm(model: FidelityModel, dz: float = 1e-4, n_nodes: int = DIAGNOSTIC_NODES,
               threads: Optional[int] = None) -> float:
    if getattr(model, "d", 1) != 1:
        raise DomainError("the rho_z diagnostic needs a one-dimensional random input")
    nodes, weights = gauss_legendre_rule(n_nodes)
    if not 0 < dz <= 1.0 - np.max(np.abs(nodes)):
        raise DomainError(f"dz={dz} pushes the stencil outside [-1, 1]")
    shifted = [RandomSample([z + s]) for z in nodes for s in (dz, -dz)]
    pairs, _ = evaluate_model(model, shifted, threads, desc="[Diagnose]")
    h = pairs[0].grid.h
    total = 0.0
    for m, w in enumerate(weights):
        drho = (pairs[2 * m].rho - pairs[2 * m + 1].rho) / (2.0 * dz)
        total += w * h * float(np.sum(drho ** 2))
    return float(np.sqrt(total))


def rho_z_diagnostic(
    model_factory: Callable[[float], FidelityModel],
    eps_list: Sequence[float],
    dz: float = 1e-4,
    threads: Optional[int] = None,
) -> List[float]:
    norms = []
    for eps in eps_list:
        norms.append(rho_z_norm(model_factory(eps), dz, threads=threads))
        logger.info("[Diagnose] eps=%.4g ||rho_z||=%.4e", eps, norms[-1])
    return norms
