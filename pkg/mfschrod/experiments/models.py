"""
experiments/models.py
Fidelity models: one solver + one mesh + one problem, evaluated at z.

Each model is immutable and holds no per-evaluation state, so a single
instance is shared by every worker thread of a sweep.
"""
import logging
from typing import Optional

import numpy as np

from ..core.fields import ObservablePair, RandomSample, observables_from_wave, wkb_initial
from ..core.grid import SpatialGrid1D
from ..errors import ConfigError, DomainError
from ..solvers.fga import fga_decompose, fga_evolve, fga_reconstruct
from ..solvers.kernels import DeltaKernelSpec
from ..solvers.levelset import PhaseGrid, ls_init, ls_observables, ls_solve
from ..solvers.tsfp import TsfpConfig, tsfp_solve
from .meshes import FGA, LEVELSET, SOLVER_KINDS, TSFP, FgaMesh, LsMesh, Mesh, TsfpMesh, resolve_mesh, steps_for
from .problems import ProblemSpec

logger = logging.getLogger(__name__)

KINDS = SOLVER_KINDS


class _ProblemModel:
    kind = ""

    def __init__(self, problem: ProblemSpec, mesh: Mesh, name: Optional[str] = None):
        self.problem = problem
        self.mesh = mesh
        self.name = name or self.kind
        self.d = problem.d
        steps, self.tau = steps_for(problem.t_final, self._tau_max())
        self.steps = steps

    def _tau_max(self) -> float:
        raise NotImplementedError

    def _check(self, z: RandomSample):
        if z.d != self.d:
            raise DomainError(f"{self.name} expects a sample of dimension {self.d}, got {z.d}")

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.problem.id}, eps={self.problem.eps:.6g}, {self.mesh})"


class TsfpModel(_ProblemModel):
    """Time-splitting spectral reference solution."""
    kind = TSFP

    def __init__(self, problem: ProblemSpec, mesh: TsfpMesh, name: Optional[str] = None):
        super().__init__(problem, mesh, name)
        self.grid = SpatialGrid1D(*problem.domain, mesh.n)
        self._cfg = TsfpConfig(tau=self.tau, t_final=problem.t_final)

    def _tau_max(self) -> float:
        return self.mesh.tau

    def evaluate(self, z: RandomSample) -> ObservablePair:
        self._check(z)
        p = self.problem
        psi0 = wkb_initial(p.wkb, z, p.eps, self.grid)
        return observables_from_wave(tsfp_solve(psi0, p.potential, z, self._cfg))


class FgaModel(_ProblemModel):
    """Frozen Gaussian approximation: decompose on a fine grid, reconstruct on `grid`."""
    kind = FGA

    def __init__(self, problem: ProblemSpec, mesh: FgaMesh, name: Optional[str] = None):
        super().__init__(problem, mesh, name)
        self.grid = SpatialGrid1D(*problem.domain, mesh.n)
        self.quad_grid = SpatialGrid1D(*problem.domain, mesh.n_quad)

    def _tau_max(self) -> float:
        return self.mesh.tau

    def evaluate(self, z: RandomSample) -> ObservablePair:
        self._check(z)
        p, m = self.problem, self.mesh
        psi0 = wkb_initial(p.wkb, z, p.eps, self.quad_grid)
        ens = fga_decompose(psi0, m.box, m.nq, m.np, m.keep_threshold)
        if self.steps:
            ens = fga_evolve(ens, p.potential, z, self.tau, p.t_final)
        return observables_from_wave(fga_reconstruct(ens, self.grid))


class LevelSetModel(_ProblemModel):
    """Liouville level-set moments with a smoothed delta of width kappa * dp."""
    kind = LEVELSET

    def __init__(self, problem: ProblemSpec, mesh: LsMesh, name: Optional[str] = None):
        super().__init__(problem, mesh, name)
        self.grid = SpatialGrid1D(*problem.domain, mesh.nx)
        self.phase_grid = PhaseGrid(self.grid, mesh.p_range[0], mesh.p_range[1], mesh.np)
        self.kernel = DeltaKernelSpec.from_spacing(mesh.kernel, self.phase_grid.dp, mesh.kappa)

    def _tau_max(self) -> float:
        return self.mesh.dt

    def evaluate(self, z: RandomSample) -> ObservablePair:
        self._check(z)
        p = self.problem
        state = ls_init(p.wkb, z, self.phase_grid)
        if self.steps:
            state = ls_solve(state, lambda x: p.potential.dv(x, z.z), self.tau, p.t_final)
        return ls_observables(state, self.kernel)


MODEL_TYPES = {TSFP: TsfpModel, FGA: FgaModel, LEVELSET: LevelSetModel}


def build_model(problem: ProblemSpec, kind: str, mesh: Optional[Mesh] = None, name: Optional[str] = None):
    if kind not in MODEL_TYPES:
        raise ConfigError(f"unknown solver kind '{kind}', expected one of {KINDS}", key="kind")
    if mesh is None:
        mesh = resolve_mesh(problem, kind)
    model = MODEL_TYPES[kind](problem, mesh, name)
    logger.debug("[Models] %r: %d steps of %.3g", model, model.steps, model.tau)
    return model


class DiagonalModel:
    """
    One-dimensional restriction z -> (z, z, ..., z) of a model.

    The collocation baseline and the rho_z diagnostic work in a scalar
    random variable; with d1 = 1 the random groups all carry this one value.
    """

    def __init__(self, model):
        self.model = model
        self.name = f"{model.name}/diagonal"
        self.grid = model.grid
        self.d = 1

    def evaluate(self, z: RandomSample) -> ObservablePair:
        if z.d != 1:
            raise DomainError(f"{self.name} expects a scalar sample, got dimension {z.d}")
        return self.model.evaluate(RandomSample(np.full(self.model.d, z.z[0])))
