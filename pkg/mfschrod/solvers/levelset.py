"""
solvers/levelset.py
Liouville level-set solver for the semiclassical limit.

Both the density carrier f and the level-set function phi solve

    u_t + p u_x - V'(x) u_p = 0

on an nx x np phase grid (periodic in x, zero-gradient in p). Moments:
    rho(x) = integral f delta(phi) dp,   J(x) = integral p f delta(phi) dp.
"""
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core.fields import ObservablePair, RandomSample, WkbData
from ..core.grid import SpatialGrid1D
from ..errors import CflViolationError, DomainError
from .kernels import DeltaKernelSpec, delta_kernel
from .tsfp import count_steps
from .weno import GHOSTS, tvd_rk3, weno5_derivatives

logger = logging.getLogger(__name__)

# x -> V'(x) for one fixed z
GradientFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PhaseGrid:
    xgrid: SpatialGrid1D
    p_min: float
    p_max: float
    np: int

    def __post_init__(self):
        if not self.p_max > self.p_min:
            raise DomainError(f"momentum range is empty: [{self.p_min}, {self.p_max}]")
        if self.np < 4:
            raise DomainError(f"momentum grid needs at least 4 nodes, got np={self.np}")

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / self.np

    @property
    def p(self) -> np.ndarray:
        return self.p_min + self.dp * np.arange(self.np)

    @property
    def shape(self):
        return (self.xgrid.n, self.np)


@dataclass(frozen=True, eq=False)
class LevelSetState:
    grid: PhaseGrid
    f: np.ndarray
    phi: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("f", "phi"):
            arr = np.array(getattr(self, name), dtype=float, copy=True)
            if arr.shape != self.grid.shape:
                raise DomainError(f"'{name}' has shape {arr.shape}, phase grid expects {self.grid.shape}")
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"'{name}' contains non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def ls_init(data: WkbData, z: RandomSample, grid: PhaseGrid) -> LevelSetState:
    x = grid.xgrid.x
    n0 = np.broadcast_to(np.asarray(data.n0(x, z.z), dtype=float), x.shape)
    ds0 = data.phase_gradient(grid.xgrid, z.z)
    f = np.repeat(n0[:, None], grid.np, axis=1)
    phi = grid.p[None, :] - ds0[:, None]
    return LevelSetState(grid, f, phi, 0.0)


def max_advection_speed(grid: PhaseGrid, v1: GradientFn) -> float:
    force = np.asarray(v1(grid.xgrid.x), dtype=float)
    return max(float(np.max(np.abs(grid.p))), float(np.max(np.abs(force))))


def cfl_timestep(grid: PhaseGrid, v1: GradientFn, safety: float = 1.0) -> float:
    """safety * min(dx, dp) / (2 * max(|p|, |V'|)); no speed at all means no constraint."""
    if not (0.0 < safety <= 1.0):
        raise DomainError(f"CFL safety factor must lie in (0, 1], got {safety}")
    h = min(grid.xgrid.h, grid.dp)
    speed = max_advection_speed(grid, v1)
    if speed == 0.0:
        return safety * h
    return safety * h / (2.0 * speed)


class LiouvilleOperator:
    """Upwind WENO5 right-hand side -p u_x + V'(x) u_p for one potential."""

    def __init__(self, grid: PhaseGrid, v1: GradientFn):
        self.grid = grid
        p = grid.p[None, :]
        self._p_pos = np.maximum(p, 0.0)
        self._p_neg = np.minimum(p, 0.0)
        # u_p is advected with speed a = -V'(x)
        a = -np.asarray(v1(grid.xgrid.x), dtype=float)[:, None]
        self._a_pos = np.maximum(a, 0.0)
        self._a_neg = np.minimum(a, 0.0)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        g = self.grid
        padded_x = np.pad(u, ((GHOSTS, GHOSTS), (0, 0)), mode="wrap")
        ux_minus, ux_plus = weno5_derivatives(padded_x, g.xgrid.h, axis=0)
        padded_p = np.pad(u, ((0, 0), (GHOSTS, GHOSTS)), mode="edge")
        up_minus, up_plus = weno5_derivatives(padded_p, g.dp, axis=1)
        return -(
            self._p_pos * ux_minus + self._p_neg * ux_plus
            + self._a_pos * up_minus + self._a_neg * up_plus
        )


def ls_solve(state: LevelSetState, v1: GradientFn, dt: float, t_final: float) -> LevelSetState:
    if not dt > 0:
        raise DomainError(f"time step must be positive, got dt={dt}")
    bound = cfl_timestep(state.grid, v1, safety=1.0)
    if dt > bound * (1.0 + 1e-12):
        raise CflViolationError(dt, bound)
    n_steps = count_steps(t_final, dt)
    if n_steps == 0:
        return state

    op = LiouvilleOperator(state.grid, v1)

    def rhs(pair):
        return op(pair[0]), op(pair[1])

    logger.debug("[LevelSet] grid=%s dt=%.3g steps=%d", state.grid.shape, dt, n_steps)
    current = (np.array(state.f), np.array(state.phi))
    for _ in range(n_steps):
        current = tvd_rk3(current, dt, rhs)
    return LevelSetState(state.grid, current[0], current[1], state.t + t_final)


def ls_observables(state: LevelSetState, spec: DeltaKernelSpec) -> ObservablePair:
    grid = state.grid
    if not spec.is_multiple_of(grid.dp):
        raise DomainError(f"kernel width {spec.eta} is not an integer multiple of dp={grid.dp}")
    weights = state.f * delta_kernel(spec, state.phi) * grid.dp
    rho = weights.sum(axis=1)
    current = weights @ grid.p
    return ObservablePair(grid.xgrid, rho, current, check_density=False)
