"""
experiments/runner.py — end-to-end experiment orchestrator

Stages, in order:
  setup → sampling → offline → test → errors → statistics
        → [bounds] → [sc_table] → archive → manifest

A failing stage raises ExperimentStageError naming the stage, after every
file this run had written is removed again.
"""
import hashlib
import json
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from .. import __version__
from ..cli.csv_io import emit_csv
from ..core.fields import ObservablePair
from ..core.sampling import sample_uniform, spawn_seeds
from ..errors import ConfigError, ExperimentStageError
from ..metrics.bounds import bound_curve
from ..metrics.collocation import sc_error_table
from ..metrics.errors import ERROR_COLUMNS, error_report, solution_statistics
from ..multifidelity.archive import save_pipeline
from ..multifidelity.pipeline import SurrogatePipeline, offline_build
from ..multifidelity.snapshots import evaluate_model
from ..schemas import ExperimentConfig
from .meshes import mesh_as_dict, resolve_mesh
from .models import DiagonalModel, build_model
from .problems import ProblemSpec, make_problem

logger = logging.getLogger(__name__)

ROLES = ("low", "medium", "high")


# ─── Config → objects ─────────────────────────────────────────────
def build_problem(cfg: ExperimentConfig, eps: Optional[float] = None) -> ProblemSpec:
    p = cfg.problem
    return make_problem(
        p.id, p.eps if eps is None else eps, d1=p.d1, t_final=p.t_final,
        p_range=p.p_range, kl_length=p.kl_length, kl_sigma=p.kl_sigma,
    )


def build_models(cfg: ExperimentConfig, problem: ProblemSpec) -> Dict[str, Any]:
    """One model per configured role; medium maps to None when absent."""
    models: Dict[str, Any] = {role: None for role in ROLES}
    for role, spec in cfg.fidelities().items():
        mesh = resolve_mesh(problem, spec.kind, spec.mesh)
        models[role] = build_model(problem, spec.kind, mesh, name=role)
    return models


def resolved_config(cfg: ExperimentConfig, problem: Optional[ProblemSpec] = None) -> Dict[str, Any]:
    """JSON-ready config with every mesh filled in from the defaults table."""
    data = cfg.model_dump(mode="json")
    problem = problem or build_problem(cfg)
    for role, spec in cfg.fidelities().items():
        data["fidelity"][role]["mesh"] = mesh_as_dict(resolve_mesh(problem, spec.kind, spec.mesh))
    return data


def config_hash(resolved: Dict[str, Any]) -> str:
    canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def error_curve(
    pipe: SurrogatePipeline,
    high_pairs: Sequence[ObservablePair],
    inference_pairs: Sequence[ObservablePair],
) -> pd.DataFrame:
    """Err1 and Err2 of the r-point prefix surrogate, r = 1..K."""
    rows = []
    for r in range(1, pipe.k + 1):
        sub = pipe.truncated(r)
        approx = [sub.combine(p) for p in inference_pairs]
        rows.append(error_report(high_pairs, approx, r).as_row())
        logger.info("[Runner] r=%d Err1=%.3e Err2=%.3e", r, rows[-1]["err_rho"], rows[-1]["err_current"])
    return pd.DataFrame(rows, columns=ERROR_COLUMNS)


# ─── Run bookkeeping ──────────────────────────────────────────────
class _Artifacts:
    """Files written by one run, so a failed run can take them back."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.created_dir = not out_dir.exists()
        self.paths: Dict[str, Path] = {}

    def csv(self, name: str, table: pd.DataFrame) -> Path:
        return self.track(name, emit_csv(table, self.out_dir / name))

    def track(self, name: str, path: Path) -> Path:
        self.paths[name] = path
        return path

    def discard(self):
        for path in self.paths.values():
            path.unlink(missing_ok=True)
        if self.created_dir and self.out_dir.exists() and not any(self.out_dir.iterdir()):
            self.out_dir.rmdir()
        logger.warning("[Runner] removed %d partial output(s) from %s", len(self.paths), self.out_dir)


@contextmanager
def _stage(name: str, timings: Dict[str, float]):
    start = time.perf_counter()
    logger.info("[Runner] stage %s", name)
    try:
        yield
    except (ConfigError, ExperimentStageError):
        raise
    except Exception as exc:
        logger.error("[Runner] stage %s failed: %s", name, exc)
        raise ExperimentStageError(name, exc) from exc
    timings[name] = time.perf_counter() - start


@dataclass
class ExperimentResult:
    out_dir: Path
    files: Dict[str, Path]
    pipeline: SurrogatePipeline
    errors: pd.DataFrame
    manifest: Dict[str, Any]
    bounds: Optional[pd.DataFrame] = None
    sc_table: Optional[pd.DataFrame] = None
    high_pairs: List[ObservablePair] = field(default_factory=list, repr=False)
    inference_pairs: List[ObservablePair] = field(default_factory=list, repr=False)


def _per_eval(seconds: float, count: int) -> float:
    return seconds / count if count else 0.0


# ─── Orchestrator ─────────────────────────────────────────────────
def run_experiment(
    cfg: ExperimentConfig,
    out_dir=None,
    threads: Optional[int] = None,
) -> ExperimentResult:
    out = Path(out_dir or cfg.outputs.dir)
    artifacts = _Artifacts(out)
    stages: Dict[str, float] = {}
    uq = cfg.uq
    bounds = sc_table = None
    try:
        with _stage("setup", stages):
            problem = build_problem(cfg)
            models = build_models(cfg, problem)
            resolved = resolved_config(cfg, problem)
            digest = config_hash(resolved)
            logger.info("[Runner] %s eps=%.6g d=%d, config %s", problem.id, problem.eps, problem.d, digest[:12])

        with _stage("sampling", stages):
            train_seed, test_seed = spawn_seeds(uq.seed, 2)
            training = sample_uniform(problem.d, uq.M, train_seed)
            test = sample_uniform(problem.d, uq.N, test_seed)

        with _stage("offline", stages):
            pipe = offline_build(
                models["low"], models["medium"], models["high"], training,
                uq.k_max, uq.tol, threads,
            )

        with _stage("test", stages):
            high_pairs, high_seconds = evaluate_model(models["high"], test, threads, desc="[Test] high")
            inference_pairs, inf_seconds = evaluate_model(
                pipe.inference_model, test, threads, desc=f"[Test] {pipe.inference_model.name}",
            )

        with _stage("errors", stages):
            errors = error_curve(pipe, high_pairs, inference_pairs)
            artifacts.csv("errors.csv", errors)

        with _stage("statistics", stages):
            surrogate = [pipe.combine(p) for p in inference_pairs]
            artifacts.csv("statistics.csv", solution_statistics(high_pairs, surrogate))

        if uq.bound_k is not None and pipe.k >= 2:
            with _stage("bounds", stages):
                n_b = min(uq.bound_samples, len(test))
                k_values = range(1, min(uq.bound_k, pipe.k - 1) + 1)
                bounds = bound_curve(pipe, high_pairs[:n_b], inference_pairs[:n_b], k_values, uq.c1, uq.c2)
                artifacts.csv("bounds.csv", bounds)
        elif uq.bound_k is not None:
            logger.warning("[Runner] bounds skipped: only K=%d point(s) selected", pipe.k)

        if cfg.sc is not None:
            with _stage("sc_table", stages):
                sc_table = sc_error_table(DiagonalModel(models["high"]), cfg.sc.n_c, cfg.sc.n_ref, threads)
                artifacts.csv("sc_table.csv", sc_table)

        with _stage("archive", stages):
            artifacts.track("pipeline.npz", save_pipeline(pipe, out / "pipeline.npz", {"config_hash": digest}))

        with _stage("manifest", stages):
            per_eval = dict(pipe.timings)
            test_per_eval = {
                "high": _per_eval(high_seconds, len(test)),
                pipe.inference_model.name: _per_eval(inf_seconds, len(test)),
            }
            reference = per_eval.get("low") or test_per_eval.get("low")
            manifest = {
                "version": __version__,
                "seed": uq.seed,
                "config": resolved,
                "config_hash": digest,
                "mode": pipe.mode,
                "selected": list(pipe.selection.indices),
                "K": pipe.k,
                "timings": {
                    "offline_per_eval": per_eval,
                    "test_per_eval": test_per_eval,
                    "stages": dict(stages),
                },
                "speedup": per_eval["high"] / reference if reference else None,
                "outputs": sorted(list(artifacts.paths) + ["manifest.json"]),
            }
            path = out / "manifest.json"
            path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
            artifacts.track("manifest.json", path)
    except Exception:
        artifacts.discard()
        raise

    logger.info("[Runner] done: K=%d, %d files in %s", pipe.k, len(artifacts.paths), out)
    return ExperimentResult(
        out_dir=out, files=dict(artifacts.paths), pipeline=pipe, errors=errors,
        manifest=manifest, bounds=bounds, sc_table=sc_table,
        high_pairs=high_pairs, inference_pairs=inference_pairs,
    )
