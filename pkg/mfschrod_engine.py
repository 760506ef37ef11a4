"""
mfschrod_engine.py — run an experiment config end to end

    python mfschrod_engine.py config/experiments/smoke.yaml [key=value ...]

Same as `python -m mfschrod experiment --config ...`, with a banner and a
short summary of the artifacts. Exit codes follow the CLI (2 config, 3 numerical).
"""
import sys

from config.settings import settings
from mfschrod.errors import ConfigError, NumericalError
from mfschrod.log import configure_logging


def run(config_path: str, overrides) -> int:
    from mfschrod.cli.config import load_config
    from mfschrod.experiments.runner import run_experiment

    cfg = load_config(config_path, overrides)
    print(f"\n[Pipeline] {cfg.problem.id}  eps={cfg.problem.eps:.6g}  "
          f"low={cfg.fidelity.low.kind}  high={cfg.fidelity.high.kind}\n")
    result = run_experiment(cfg)

    print("\n[Ready] Artifacts:")
    for name, path in sorted(result.files.items()):
        print(f"  {name:<16} → {path}")
    last = result.errors.iloc[-1]
    print(f"\n  K={result.pipeline.k}  Err1={last['err_rho']:.3e}  Err2={last['err_current']:.3e}")
    speedup = result.manifest.get("speedup")
    if speedup:
        print(f"  high/low cost per evaluation: {speedup:.1f}x\n")
    return 0


if __name__ == "__main__":
    print("=" * 60)
    print("  MFSCHROD — Multi-fidelity Schrödinger UQ Engine")
    print("=" * 60)

    if len(sys.argv) < 2:
        print("usage: python mfschrod_engine.py CONFIG.yaml [key=value ...]")
        sys.exit(2)

    configure_logging(settings.log_level)
    try:
        code = run(sys.argv[1], sys.argv[2:])
    except ConfigError as exc:
        print(f"\n[Config] {exc}")
        code = 2
    except NumericalError as exc:
        print(f"\n[Stop] {exc}")
        code = 3
    except KeyboardInterrupt:
        print("\n[Stop] Run interrupted.")
        code = 1
    sys.exit(code)
