"""
solvers/weno.py
Fifth-order WENO one-sided derivatives (Hamilton-Jacobi form) and the
three-stage TVD Runge-Kutta step used by the level-set solver.

Input arrays carry 3 ghost layers on each side of the differentiated axis;
outputs have the ghost layers removed.
"""
from typing import Callable, Tuple

import numpy as np

from config.settings import settings

GHOSTS = 3

_LINEAR_WEIGHTS = (0.1, 0.6, 0.3)


def _weno5(v1, v2, v3, v4, v5, reg: float) -> np.ndarray:
    phi1 = v1 / 3.0 - 7.0 * v2 / 6.0 + 11.0 * v3 / 6.0
    phi2 = -v2 / 6.0 + 5.0 * v3 / 6.0 + v4 / 3.0
    phi3 = v3 / 3.0 + 5.0 * v4 / 6.0 - v5 / 6.0

    s1 = 13.0 / 12.0 * (v1 - 2.0 * v2 + v3) ** 2 + 0.25 * (v1 - 4.0 * v2 + 3.0 * v3) ** 2
    s2 = 13.0 / 12.0 * (v2 - 2.0 * v3 + v4) ** 2 + 0.25 * (v2 - v4) ** 2
    s3 = 13.0 / 12.0 * (v3 - 2.0 * v4 + v5) ** 2 + 0.25 * (3.0 * v3 - 4.0 * v4 + v5) ** 2

    a1 = _LINEAR_WEIGHTS[0] / (reg + s1) ** 2
    a2 = _LINEAR_WEIGHTS[1] / (reg + s2) ** 2
    a3 = _LINEAR_WEIGHTS[2] / (reg + s3) ** 2
    total = a1 + a2 + a3
    return (a1 * phi1 + a2 * phi2 + a3 * phi3) / total


def weno5_derivatives(padded: np.ndarray, h: float, axis: int, reg: float = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Left-biased (minus) and right-biased (plus) approximations of du/dx along
    `axis`. `padded` has n + 6 entries along that axis; both outputs have n.
    """
    if reg is None:
        reg = settings.weno_eps
    u = np.moveaxis(padded, axis, 0)
    n = u.shape[0] - 2 * GHOSTS
    diff = (u[1:] - u[:-1]) / h            # diff[i] = (u[i+1] - u[i]) / h, n + 5 entries

    def window(offset):
        return diff[offset:offset + n]

    minus = _weno5(window(0), window(1), window(2), window(3), window(4), reg)
    plus = _weno5(window(5), window(4), window(3), window(2), window(1), reg)
    return np.moveaxis(minus, 0, axis), np.moveaxis(plus, 0, axis)


def tvd_rk3(u, dt: float, rhs: Callable):
    """Shu-Osher three-stage TVD Runge-Kutta; works on tuples of arrays."""
    def euler(state):
        return tuple(s + dt * ds for s, ds in zip(state, rhs(state)))

    u1 = euler(u)
    u2 = tuple(0.75 * a + 0.25 * b for a, b in zip(u, euler(u1)))
    return tuple(a / 3.0 + 2.0 / 3.0 * b for a, b in zip(u, euler(u2)))
