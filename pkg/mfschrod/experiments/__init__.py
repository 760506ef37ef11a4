from .kl import KLField, kl_eigenpairs
from .problems import ProblemSpec, make_problem, PROBLEM_IDS
from .meshes import TsfpMesh, FgaMesh, LsMesh, resolve_mesh, default_mesh_values, levelset_cfl_bound
from .models import TsfpModel, FgaModel, LevelSetModel, DiagonalModel, build_model, KINDS
from .runner import ExperimentResult, run_experiment, build_problem, build_models, resolved_config, config_hash

__all__ = [
    "KLField",
    "kl_eigenpairs",
    "ProblemSpec",
    "make_problem",
    "PROBLEM_IDS",
    "TsfpMesh",
    "FgaMesh",
    "LsMesh",
    "resolve_mesh",
    "default_mesh_values",
    "levelset_cfl_bound",
    "TsfpModel",
    "FgaModel",
    "LevelSetModel",
    "DiagonalModel",
    "build_model",
    "KINDS",
    "ExperimentResult",
    "run_experiment",
    "build_problem",
    "build_models",
    "resolved_config",
    "config_hash",
]
