"""
cli/config.py
Experiment config: YAML text → validated ExperimentConfig with every mesh
filled in from config/mesh_defaults.json.

Errors carry the dotted key and, when the key came from the file, its line:
    line 7: unknown key 'uq.K_max'; did you mean 'uq.k_max'?
"""
import difflib
import logging
import typing
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

import yaml
from pydantic import BaseModel, ValidationError

from ..errors import ConfigError, MfschrodError
from ..experiments.meshes import LEVELSET, SOLVER_KINDS, levelset_cfl_bound, mesh_as_dict, mesh_keys, resolve_mesh
from ..experiments.runner import build_problem
from ..schemas import ExperimentConfig, FidelitySpec

logger = logging.getLogger(__name__)

Marks = Dict[str, int]


# ─── YAML with line numbers ───────────────────────────────────────
def _key_lines(node, prefix: str, marks: Marks):
    if not isinstance(node, yaml.MappingNode):
        return
    for key_node, value_node in node.value:
        path = f"{prefix}{key_node.value}"
        marks[path] = key_node.start_mark.line + 1
        _key_lines(value_node, f"{path}.", marks)


def _load_yaml(text: str) -> Tuple[Dict[str, Any], Marks]:
    try:
        data = yaml.safe_load(text)
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"YAML syntax error: {problem}", line=line) from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping of sections", line=1)
    marks: Marks = {}
    _key_lines(node, "", marks)
    return data, marks


def _line_for(path: str, marks: Marks) -> Optional[int]:
    parts = path.split(".")
    while parts:
        line = marks.get(".".join(parts))
        if line is not None:
            return line
        parts.pop()
    return None


# ─── --set overrides ──────────────────────────────────────────────
def apply_overrides(data: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Apply 'a.b.c=value' assignments; the value is read as a YAML scalar."""
    for item in overrides or ():
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"override '{item}' is not of the form key=value", key=key or None)
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as exc:
            raise ConfigError(f"override '{item}': value is not valid YAML", key=key) from exc
        node = data
        parts = key.split(".")
        for part in parts[:-1]:
            child = node.get(part)
            if not isinstance(child, dict):
                child = node[part] = {}
            node = child
        node[parts[-1]] = value
    return data


# ─── Unknown keys ─────────────────────────────────────────────────
def _suggest(key: str, allowed: Sequence[str], prefix: str) -> str:
    by_lower = {a.lower(): a for a in allowed}
    match = by_lower.get(key.lower())
    if match is None:
        close = difflib.get_close_matches(key, list(allowed), n=1, cutoff=0.6)
        match = close[0] if close else None
    if match is not None:
        return f"; did you mean '{prefix}{match}'?"
    return f"; expected one of {sorted(allowed)}"


def _section_model(annotation) -> Optional[type]:
    for candidate in (annotation, *typing.get_args(annotation)):
        if isinstance(candidate, type) and issubclass(candidate, BaseModel):
            return candidate
    return None


def _reject(key: str, allowed: Sequence[str], prefix: str, marks: Marks):
    path = f"{prefix}{key}"
    raise ConfigError(f"unknown key '{path}'{_suggest(key, allowed, prefix)}", key=path, line=_line_for(path, marks))


def check_keys(data: Any, model: type, prefix: str, marks: Marks):
    if not isinstance(data, dict):
        return
    fields = model.model_fields
    for key, value in data.items():
        key = str(key)
        if key not in fields:
            _reject(key, list(fields), prefix, marks)
        section = _section_model(fields[key].annotation)
        if section is None:
            continue
        check_keys(value, section, f"{prefix}{key}.", marks)
        if section is FidelitySpec and isinstance(value, dict):
            kind, mesh = value.get("kind"), value.get("mesh")
            if kind in SOLVER_KINDS and isinstance(mesh, dict):
                allowed = mesh_keys(kind)
                for mesh_key in mesh:
                    if mesh_key not in allowed:
                        _reject(str(mesh_key), allowed, f"{prefix}{key}.mesh.", marks)


def _from_validation(exc: ValidationError, marks: Marks) -> ConfigError:
    err = exc.errors()[0]
    path = ".".join(str(part) for part in err["loc"])
    msg = err["msg"].removeprefix("Value error, ")
    where = f"'{path}'" if path else "config"
    return ConfigError(f"invalid value for {where}: {msg}", key=path or None, line=_line_for(path, marks))


# ─── Meshes ───────────────────────────────────────────────────────
def fill_meshes(cfg: ExperimentConfig, marks: Optional[Marks] = None) -> ExperimentConfig:
    """Resolve every fidelity mesh against the defaults table and check the level-set CFL bound."""
    marks = marks or {}
    try:
        problem = build_problem(cfg)
    except ConfigError as exc:
        raise ConfigError(str(exc), key=exc.key, line=_line_for(exc.key or "problem", marks)) from exc
    except MfschrodError as exc:
        raise ConfigError(f"problem cannot be built: {exc}", key="problem", line=_line_for("problem", marks)) from exc

    for role, spec in cfg.fidelities().items():
        base = f"fidelity.{role}"
        try:
            mesh = resolve_mesh(problem, spec.kind, spec.mesh)
        except ConfigError as exc:
            key = f"{base}.{exc.key}" if exc.key else base
            raise ConfigError(f"{role}: {exc}", key=key, line=_line_for(key, marks)) from exc
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{role}: invalid mesh value ({exc})", key=f"{base}.mesh",
                              line=_line_for(f"{base}.mesh", marks)) from exc
        if spec.kind == LEVELSET:
            bound = levelset_cfl_bound(problem, mesh.nx, mesh.np, mesh.p_range)
            if mesh.dt > bound * (1.0 + 1e-12):
                key = f"{base}.mesh.dt"
                raise ConfigError(
                    f"{role}: level-set dt={mesh.dt:.6g} exceeds the CFL bound {bound:.6g} "
                    f"(nx={mesh.nx}, np={mesh.np}, p_range={list(mesh.p_range)})",
                    key=key, line=_line_for(key, marks),
                )
        spec.mesh = mesh_as_dict(mesh)
    return cfg


# ─── Public entry points ──────────────────────────────────────────
def parse_config(text: str, overrides: Sequence[str] = ()) -> ExperimentConfig:
    data, marks = _load_yaml(text)
    apply_overrides(data, overrides)
    check_keys(data, ExperimentConfig, "", marks)
    try:
        cfg = ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise _from_validation(exc, marks) from exc
    return fill_meshes(cfg, marks)


def serialize(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.model_dump(mode="json", exclude_none=True), sort_keys=False)


def load_config(path, overrides: Sequence[str] = ()) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    cfg = parse_config(text, overrides)
    logger.debug("[Config] loaded %s", path)
    return cfg
