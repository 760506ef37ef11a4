from .snapshots import (
    FidelityModel, SnapshotMatrix, evaluate_model, snapshots_from_pairs, build_snapshots,
    quantity_scales, RHO, CURRENT, STACKED,
)
from .greedy import SelectionResult, greedy_select
from .galerkin import GalerkinSystem, assemble_gramian, infer_coefficients
from .pipeline import SurrogatePipeline, offline_build, surrogate_evaluate, BIFIDELITY, TRIFIDELITY
from .archive import save_pipeline, load_pipeline, archive_metadata

__all__ = [
    "FidelityModel",
    "SnapshotMatrix",
    "evaluate_model",
    "snapshots_from_pairs",
    "build_snapshots",
    "quantity_scales",
    "RHO",
    "CURRENT",
    "STACKED",
    "SelectionResult",
    "greedy_select",
    "GalerkinSystem",
    "assemble_gramian",
    "infer_coefficients",
    "SurrogatePipeline",
    "offline_build",
    "surrogate_evaluate",
    "BIFIDELITY",
    "TRIFIDELITY",
    "save_pipeline",
    "load_pipeline",
    "archive_metadata",
]
