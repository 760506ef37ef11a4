"""
cli/main.py — `mfschrod` command line

    mfschrod solve|offline|online|experiment|bound|sc-table|diagnose
             --config PATH [--set key=value]... [--out DIR] [--threads N]

Exit codes: 0 success, 2 config or usage error, 3 numerical failure.
"""
import functools
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import click
import numpy as np
import pandas as pd

from config.settings import settings
from .. import __version__
from ..core.fields import RandomSample
from ..core.sampling import sample_uniform, spawn_seeds
from ..errors import ConfigError, MfschrodError, NumericalError
from ..experiments.meshes import resolve_mesh
from ..experiments.models import DiagonalModel, build_model
from ..experiments.runner import build_models, build_problem, config_hash, resolved_config, run_experiment
from ..log import configure_logging
from ..metrics.bounds import relative_error
from ..metrics.collocation import sc_error_table
from ..metrics.diagnostics import rho_z_diagnostic
from ..multifidelity.archive import archive_metadata, load_pipeline, save_pipeline
from ..multifidelity.pipeline import offline_build, surrogate_evaluate
from ..schemas import DiagnoseConfig, SCConfig
from .config import load_config
from .csv_io import emit_csv

logger = logging.getLogger("mfschrod.cli")

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


# ─── Shared options ───────────────────────────────────────────────
def common_options(func):
    @click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False),
                  help="Experiment config (YAML).")
    @click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
                  help="Override a config key, e.g. --set uq.k_max=5.")
    @click.option("--out", "out_dir", default=None, help="Output directory (default: outputs.dir).")
    @click.option("--threads", default=None, type=click.IntRange(min=1),
                  help="Worker threads for sample sweeps (default: all cores).")
    @functools.wraps(func)
    def wrapper(config_path, overrides, out_dir, threads, **kwargs):
        cfg = load_config(config_path, overrides)
        out = Path(out_dir or cfg.outputs.dir)
        return func(cfg=cfg, out=out, threads=threads or settings.threads, **kwargs)
    return wrapper


def _parse_z(text: Optional[str], d: int) -> RandomSample:
    """'0.1,-0.3,...' with d entries; a single value is repeated; default is z = 0."""
    if text is None:
        return RandomSample(np.zeros(d))
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"--z must be comma-separated numbers, got '{text}'", key="z") from exc
    if len(values) == 1:
        values = values * d
    if len(values) != d:
        raise ConfigError(f"--z has {len(values)} entries, the problem has d={d}", key="z")
    try:
        return RandomSample(values)
    except MfschrodError as exc:
        raise ConfigError(str(exc), key="z") from exc


def _observable_table(pair) -> pd.DataFrame:
    return pd.DataFrame({"x": pair.grid.x, "rho": pair.rho, "current": pair.current})


def _write_manifest(out: Path, cfg, name: str, extra: dict) -> Path:
    resolved = resolved_config(cfg)
    manifest = {
        "version": __version__,
        "seed": cfg.uq.seed,
        "config": resolved,
        "config_hash": config_hash(resolved),
        **extra,
    }
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


# ─── Commands ─────────────────────────────────────────────────────
@click.group()
@click.version_option(__version__, prog_name="mfschrod")
@click.option("--log-level", default=None, help="DEBUG, INFO, WARNING... (default: MFSCHROD_LOG_LEVEL).")
def cli(log_level):
    """Multi-fidelity uncertainty quantification for the semiclassical Schrödinger equation."""
    configure_logging(log_level or settings.log_level)


@cli.command()
@common_options
@click.option("--fidelity", type=click.Choice(["low", "medium", "high"]), default="high", show_default=True)
@click.option("--z", "z_text", default=None, help="Random sample, comma separated (default: 0).")
def solve(cfg, out, threads, fidelity, z_text):
    """Run one fidelity model at one z; writes solve_<fidelity>.csv (x, rho, current)."""
    problem = build_problem(cfg)
    model = build_models(cfg, problem)[fidelity]
    if model is None:
        raise ConfigError(f"no '{fidelity}' fidelity configured", key=f"fidelity.{fidelity}")
    pair = model.evaluate(_parse_z(z_text, problem.d))
    path = emit_csv(_observable_table(pair), out / f"solve_{fidelity}.csv")
    _write_manifest(out, cfg, f"solve_{fidelity}.json", {"fidelity": fidelity, "z": z_text or "0"})
    click.echo(f"[Solve] {fidelity} ({model.kind}, n={pair.grid.n}) -> {path}")


@cli.command()
@common_options
def offline(cfg, out, threads):
    """Greedy selection + high-fidelity runs; writes pipeline.npz."""
    problem = build_problem(cfg)
    models = build_models(cfg, problem)
    train_seed, _ = spawn_seeds(cfg.uq.seed, 2)
    training = sample_uniform(problem.d, cfg.uq.M, train_seed)
    pipe = offline_build(models["low"], models["medium"], models["high"], training,
                         cfg.uq.k_max, cfg.uq.tol, threads)
    digest = config_hash(resolved_config(cfg, problem))
    path = save_pipeline(pipe, out / "pipeline.npz", {"config_hash": digest})
    _write_manifest(out, cfg, "offline.json", {"K": pipe.k, "selected": list(pipe.selection.indices),
                                                "timings": pipe.timings})
    click.echo(f"[Offline] {pipe.mode}, K={pipe.k} -> {path}")


@cli.command()
@common_options
@click.option("--archive", "archive_path", required=True, type=click.Path(dir_okay=False, exists=True))
@click.option("--z", "z_text", default=None, help="Random sample, comma separated (default: 0).")
@click.option("--compare/--no-compare", default=False, help="Also run the high model and log the relative error.")
def online(cfg, out, threads, archive_path, z_text, compare):
    """Surrogate at one z from a saved pipeline; writes surrogate.csv."""
    problem = build_problem(cfg)
    models = build_models(cfg, problem)
    stored = archive_metadata(archive_path).get("config_hash")
    current = config_hash(resolved_config(cfg, problem))
    if stored and stored != current:
        logger.warning("[Online] archive was built from a different config (%s != %s)", stored[:12], current[:12])
    pipe = load_pipeline(archive_path, models["low"], models["medium"], models["high"])
    z = _parse_z(z_text, problem.d)
    pair = surrogate_evaluate(pipe, z)
    path = emit_csv(_observable_table(pair), out / "surrogate.csv")
    if compare:
        ref = models["high"].evaluate(z)
        h = ref.grid.h
        click.echo(f"[Online] relative error rho={relative_error(ref.rho, pair.rho, h):.3e} "
                   f"J={relative_error(ref.current, pair.current, h):.3e}")
    click.echo(f"[Online] K={pipe.k} -> {path}")


@cli.command()
@common_options
def experiment(cfg, out, threads):
    """Full run: offline build, error curve, statistics, optional bounds and SC table."""
    result = run_experiment(cfg, out, threads)
    last = result.errors.iloc[-1]
    click.echo(f"[Experiment] K={result.pipeline.k} Err1={last['err_rho']:.3e} "
               f"Err2={last['err_current']:.3e} -> {result.out_dir}")


@cli.command()
@common_options
def bound(cfg, out, threads):
    """Experiment with the empirical bound sweep forced on (bound_k defaults to k_max - 1)."""
    if cfg.uq.k_max < 2:
        raise ConfigError("the bound needs uq.k_max >= 2", key="uq.k_max")
    if cfg.uq.bound_k is None:
        cfg.uq.bound_k = cfg.uq.k_max - 1
    cfg.sc = None
    result = run_experiment(cfg, out, threads)
    if result.bounds is not None and len(result.bounds):
        row = result.bounds.iloc[-1]
        click.echo(f"[Bound] k={int(row['k'])} coverage={row['coverage']:.2f} -> {result.out_dir}")


@cli.command("sc-table")
@common_options
def sc_table(cfg, out, threads):
    """Gauss-Legendre collocation of the high model along z = (s, ..., s); writes sc_table.csv."""
    sc = cfg.sc or SCConfig()
    problem = build_problem(cfg)
    high = build_models(cfg, problem)["high"]
    table = sc_error_table(DiagonalModel(high), sc.n_c, sc.n_ref, threads)
    path = emit_csv(table, out / "sc_table.csv")
    _write_manifest(out, cfg, "sc_table.json", {"n_c": sc.n_c, "n_ref": sc.n_ref})
    click.echo(f"[SC] {len(table)} rows -> {path}")


@cli.command()
@common_options
def diagnose(cfg, out, threads):
    """||d rho / dz|| of the high model for each eps in diagnose.eps; writes diagnose.csv."""
    diag = cfg.diagnose or DiagnoseConfig()
    kind = cfg.fidelity.high.kind

    def factory(eps):
        problem = build_problem(cfg, eps=eps)
        return DiagonalModel(build_model(problem, kind, resolve_mesh(problem, kind), name="high"))

    norms = rho_z_diagnostic(factory, diag.eps, diag.dz, threads)
    ratios = [float("nan")] + [b / a if a > 0 else float("nan") for a, b in zip(norms, norms[1:])]
    path = emit_csv({"eps": diag.eps, "rho_z_norm": norms, "ratio": ratios}, out / "diagnose.csv")
    click.echo(f"[Diagnose] {len(norms)} eps values -> {path}")


# ─── Entry point ──────────────────────────────────────────────────
def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cli.main(args=list(argv) if argv is not None else None, prog_name="mfschrod", standalone_mode=False)
    except ConfigError as exc:
        logger.error("[Config] %s", exc)
        click.echo(f"config error: {exc}", err=True)
        return EXIT_CONFIG
    except NumericalError as exc:
        logger.error("[Numerical] %s", exc)
        click.echo(f"numerical failure: {exc}", err=True)
        return EXIT_NUMERICAL
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
