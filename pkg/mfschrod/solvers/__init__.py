from .tsfp import TsfpConfig, TsfpPropagator, tsfp_step, tsfp_solve, count_steps
from .fga import FGAParticle, FGAEnsemble, fga_decompose, fga_evolve, fga_reconstruct
from .kernels import DeltaKernelSpec, delta_kernel, PIECEWISE_LINEAR, COSINE
from .levelset import PhaseGrid, LevelSetState, ls_init, cfl_timestep, ls_solve, ls_observables

__all__ = [
    "TsfpConfig",
    "TsfpPropagator",
    "tsfp_step",
    "tsfp_solve",
    "count_steps",
    "FGAParticle",
    "FGAEnsemble",
    "fga_decompose",
    "fga_evolve",
    "fga_reconstruct",
    "DeltaKernelSpec",
    "delta_kernel",
    "PIECEWISE_LINEAR",
    "COSINE",
    "PhaseGrid",
    "LevelSetState",
    "ls_init",
    "cfl_timestep",
    "ls_solve",
    "ls_observables",
]
