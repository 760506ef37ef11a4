"""
experiments/meshes.py
Per-fidelity mesh settings and their defaults from config/mesh_defaults.json.

Time steps in a mesh are upper bounds: a model takes ceil(T / tau) equal
steps so that the final time is hit exactly.
"""
import json
import math
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from ..errors import ConfigError
from ..solvers.kernels import KERNEL_KINDS
from .problems import ProblemSpec

DEFAULTS_PATH = Path(__file__).resolve().parents[2] / "config" / "mesh_defaults.json"
DEFAULTS_VERSION = 1

TSFP, FGA, LEVELSET = "tsfp", "fga", "levelset"
SOLVER_KINDS = (TSFP, FGA, LEVELSET)


def _even(n: float) -> int:
    n = int(math.ceil(n - 1e-9))
    return max(2, n + n % 2)


def steps_for(t_final: float, tau_max: float) -> Tuple[int, float]:
    """(steps, tau) with steps * tau == t_final and tau <= tau_max."""
    if t_final == 0:
        return 0, tau_max
    steps = max(1, int(math.ceil(t_final / tau_max - 1e-9)))
    return steps, t_final / steps


@dataclass(frozen=True)
class TsfpMesh:
    n: int
    tau: float

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ConfigError(f"tsfp mesh needs an even n >= 2, got {self.n}", key="mesh.n")
        if not self.tau > 0:
            raise ConfigError(f"tsfp tau must be positive, got {self.tau}", key="mesh.tau")


@dataclass(frozen=True)
class FgaMesh:
    n: int                  # reconstruction grid
    n_quad: int             # grid for the initial phase-space transform
    nq: int
    np: int
    tau: float
    keep_threshold: float
    q_box: Tuple[float, float]
    p_box: Tuple[float, float]

    def __post_init__(self):
        for name in ("n", "n_quad"):
            value = getattr(self, name)
            if value < 2 or value % 2:
                raise ConfigError(f"fga {name} must be even and >= 2, got {value}", key=f"mesh.{name}")
        if self.nq < 2 or self.np < 2:
            raise ConfigError(f"fga phase mesh needs nq, np >= 2, got {self.nq}, {self.np}", key="mesh.nq")
        if not self.tau > 0:
            raise ConfigError(f"fga tau must be positive, got {self.tau}", key="mesh.tau")
        if not 0.0 <= self.keep_threshold < 1.0:
            raise ConfigError(f"keep_threshold must lie in [0, 1), got {self.keep_threshold}", key="mesh.keep_threshold")
        object.__setattr__(self, "q_box", tuple(self.q_box))
        object.__setattr__(self, "p_box", tuple(self.p_box))

    @property
    def box(self) -> Tuple[float, float, float, float]:
        return (*self.q_box, *self.p_box)


@dataclass(frozen=True)
class LsMesh:
    nx: int
    np: int
    dt: float
    p_range: Tuple[float, float]
    kernel: str = "cosine"
    kappa: int = 2

    def __post_init__(self):
        if self.nx < 2 or self.nx % 2:
            raise ConfigError(f"levelset nx must be even and >= 2, got {self.nx}", key="mesh.nx")
        if self.np < 4:
            raise ConfigError(f"levelset np must be at least 4, got {self.np}", key="mesh.np")
        if not self.dt > 0:
            raise ConfigError(f"levelset dt must be positive, got {self.dt}", key="mesh.dt")
        if self.kernel not in KERNEL_KINDS:
            raise ConfigError(f"unknown kernel '{self.kernel}', expected one of {KERNEL_KINDS}", key="mesh.kernel")
        if self.kappa < 1:
            raise ConfigError(f"kappa must be a positive integer, got {self.kappa}", key="mesh.kappa")
        object.__setattr__(self, "p_range", tuple(self.p_range))


Mesh = Union[TsfpMesh, FgaMesh, LsMesh]
MESH_TYPES = {TSFP: TsfpMesh, FGA: FgaMesh, LEVELSET: LsMesh}


def mesh_keys(kind: str):
    return tuple(f.name for f in fields(MESH_TYPES[kind]))


@lru_cache(maxsize=4)
def load_defaults(path: Optional[str] = None) -> Dict[str, Any]:
    src = Path(path) if path else DEFAULTS_PATH
    with open(src, encoding="utf-8") as fh:
        table = json.load(fh)
    if table.get("version") != DEFAULTS_VERSION:
        raise ConfigError(f"{src}: defaults table version {table.get('version')}, expected {DEFAULTS_VERSION}")
    return table


def desk_entry(problem: ProblemSpec, kind: str) -> Optional[Dict[str, Any]]:
    for entry in load_defaults()["entries"]:
        if problem.id in entry["problems"] and abs(float(Fraction(entry["eps"])) - problem.eps) < 1e-12:
            return dict(entry["desk"].get(kind, {})) or None
    return None


def _generic(problem: ProblemSpec, kind: str) -> Dict[str, Any]:
    rule = load_defaults()["generic"][kind]
    eps, length = problem.eps, problem.length
    if kind == TSFP:
        return {"n": _even(length / (rule["h_over_eps"] * eps)), "tau": rule["tau"]}
    if kind == FGA:
        spacing = rule["phase_spacing_over_sqrt_eps"] * math.sqrt(eps)
        return {
            "n": _even(length / (rule["h_over_eps"] * eps)),
            "n_quad": _even(length / (rule["quad_h_over_eps"] * eps)),
            "nq": int(math.ceil((problem.q_box[1] - problem.q_box[0]) / spacing)) + 1,
            "np": int(math.ceil((problem.p_box[1] - problem.p_box[0]) / spacing)) + 1,
            "tau": rule["tau"],
            "keep_threshold": rule["keep_threshold"],
        }
    p_min, p_max = problem.p_range
    nx = _even(length / rule["dx"])
    np_ = max(4, int(round((p_max - p_min) / rule["dp"])))
    mesh = {"nx": nx, "np": np_, "kernel": rule["kernel"], "kappa": rule["kappa"]}
    mesh["dt"] = rule["cfl_safety"] * levelset_cfl_bound(problem, nx, np_, problem.p_range)
    return mesh


def levelset_cfl_bound(problem: ProblemSpec, nx: int, np_: int, p_range) -> float:
    """CFL bound over z = 0 and the two constant corners of the random cube."""
    from ..core.grid import SpatialGrid1D
    from ..solvers.levelset import PhaseGrid, cfl_timestep

    grid = PhaseGrid(SpatialGrid1D(problem.domain[0], problem.domain[1], nx), p_range[0], p_range[1], np_)
    bounds = []
    for corner in (0.0, 1.0, -1.0):
        z = np.full(problem.d, corner)
        bounds.append(cfl_timestep(grid, lambda x, z=z: problem.potential.dv(x, z), safety=1.0))
    return min(bounds)


def default_mesh_values(problem: ProblemSpec, kind: str) -> Dict[str, Any]:
    if kind not in SOLVER_KINDS:
        raise ConfigError(f"unknown solver kind '{kind}', expected one of {SOLVER_KINDS}", key="kind")
    values = desk_entry(problem, kind) or _generic(problem, kind)
    if kind == FGA:
        values.setdefault("q_box", list(problem.q_box))
        values.setdefault("p_box", list(problem.p_box))
    if kind == LEVELSET:
        values.setdefault("p_range", list(problem.p_range))
    return values


def resolve_mesh(problem: ProblemSpec, kind: str, overrides: Optional[Dict[str, Any]] = None) -> Mesh:
    values = default_mesh_values(problem, kind)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    allowed = set(mesh_keys(kind))
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise ConfigError(f"{kind} mesh does not take {unknown}", key=f"mesh.{unknown[0]}")
    return MESH_TYPES[kind](**values)


def mesh_as_dict(mesh: Mesh) -> Dict[str, Any]:
    out = asdict(mesh)
    return {k: list(v) if isinstance(v, tuple) else v for k, v in out.items()}
