"""
multifidelity/archive.py
Pipeline archive so the offline and online stages can run as separate
processes. One .npz file: arrays per observable plus a JSON metadata blob.
Models are not stored; the caller reattaches them from the experiment config.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from ..core.fields import RandomSample
from ..core.grid import SpatialGrid1D
from ..errors import ConfigError
from .galerkin import GalerkinSystem
from .greedy import SelectionResult
from .pipeline import OBSERVABLES, SurrogatePipeline
from .snapshots import SnapshotMatrix

logger = logging.getLogger(__name__)

ARCHIVE_VERSION = 1


def save_pipeline(pipe: SurrogatePipeline, path, metadata: Optional[Dict[str, Any]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = {
        "version": ARCHIVE_VERSION,
        "mode": pipe.mode,
        "high_grid": [pipe.high_grid.a, pipe.high_grid.b, pipe.high_grid.n],
        "timings": pipe.timings,
        "user": metadata or {},
    }
    arrays = {
        "samples": np.array([s.z for s in pipe.samples]),
        "indices": np.array(pipe.selection.indices, dtype=np.int64),
        "residuals": np.array(pipe.selection.residuals),
        "metadata": np.array(json.dumps(meta, sort_keys=True)),
    }
    for q in OBSERVABLES:
        sys = pipe.systems[q]
        arrays[f"{q}_inference"] = pipe.inference[q].columns
        arrays[f"{q}_inference_weight"] = np.array(pipe.inference[q].ip_weight)
        arrays[f"{q}_high"] = pipe.high_snapshots[q].columns
        arrays[f"{q}_gram"] = sys.gram
        arrays[f"{q}_chol"] = sys.chol
        arrays[f"{q}_lambda_min"] = np.array(sys.lambda_min)
        arrays[f"{q}_active"] = np.array(sys.active, dtype=np.int64)
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)
    logger.info("[Archive] wrote %s (K=%d)", path, pipe.k)
    return path


def load_pipeline(path, low=None, medium=None, high=None) -> SurrogatePipeline:
    path = Path(path)
    try:
        data = np.load(path, allow_pickle=False)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read pipeline archive {path}: {exc}") from exc
    with data:
        meta = json.loads(str(data["metadata"]))
        if meta.get("version") != ARCHIVE_VERSION:
            raise ConfigError(f"archive {path} has version {meta.get('version')}, expected {ARCHIVE_VERSION}")
        samples = [RandomSample(row) for row in np.atleast_2d(data["samples"])]
        selection = SelectionResult(tuple(data["indices"]), tuple(data["residuals"]))
        a, b, n = meta["high_grid"]
        grid = SpatialGrid1D(float(a), float(b), int(n))
        inference, high_snaps, systems = {}, {}, {}
        for q in OBSERVABLES:
            weight = float(data[f"{q}_inference_weight"])
            inference[q] = SnapshotMatrix(data[f"{q}_inference"], samples, weight)
            high_snaps[q] = SnapshotMatrix(data[f"{q}_high"], samples, grid.h)
            systems[q] = GalerkinSystem(
                gram=np.array(data[f"{q}_gram"]),
                chol=np.array(data[f"{q}_chol"]),
                lambda_min=float(data[f"{q}_lambda_min"]),
                active=tuple(int(i) for i in data[f"{q}_active"]),
                ip_weight=weight,
            )
    return SurrogatePipeline(
        low=low, medium=medium, high=high,
        selection=selection, samples=tuple(samples),
        inference=inference, high_snapshots=high_snaps, systems=systems,
        mode=meta["mode"], high_grid=grid, timings=meta.get("timings", {}),
    )


def archive_metadata(path) -> Dict[str, Any]:
    with np.load(Path(path), allow_pickle=False) as data:
        return json.loads(str(data["metadata"]))["user"]
