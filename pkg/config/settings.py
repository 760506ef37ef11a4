"""
config/settings.py
Central configuration — process-wide knobs, all values from environment variables.
Experiment-specific values (problem, meshes, sample sizes) live in the YAML
experiment configs under config/experiments/, not here.
"""
import os
from dataclasses import dataclass


@dataclass
class Settings:
    # ── Execution ───────────────────────────────────────────────
    threads: int        = int(os.getenv("MFSCHROD_THREADS", str(os.cpu_count() or 1)))
    output_dir: str     = os.getenv("MFSCHROD_OUTPUT_DIR", "runs")
    log_level: str      = os.getenv("MFSCHROD_LOG_LEVEL", "INFO")
    progress: bool      = os.getenv("MFSCHROD_PROGRESS", "1") not in ("0", "false", "no")
    default_seed: int   = int(os.getenv("MFSCHROD_SEED", "20240521"))

    # ── Level-set solver ────────────────────────────────────────
    weno_eps: float         = float(os.getenv("MFSCHROD_WENO_EPS", "1e-6"))
    kernel_kappa: int       = int(os.getenv("MFSCHROD_KERNEL_KAPPA", "2"))   # eta = kappa * dp

    # ── FGA solver ──────────────────────────────────────────────
    fga_cutoff_factor: float = float(os.getenv("MFSCHROD_FGA_CUTOFF", "10"))  # radius = factor * sqrt(eps)
    fga_chunk: int           = int(os.getenv("MFSCHROD_FGA_CHUNK", "256"))    # particles per reconstruction block

    # ── Galerkin / greedy ───────────────────────────────────────
    gram_truncation: float  = float(os.getenv("MFSCHROD_GRAM_TRUNCATION", "1e-12"))


settings = Settings()
