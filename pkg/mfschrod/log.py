"""
log.py — logging setup.

Modules log through `logging.getLogger(__name__)` with a bracketed tag
("[TSFP] ...", "[Greedy] ..."); the CLI installs a rich handler once.
"""
import logging

from rich.logging import RichHandler


def configure_logging(level: str = "INFO") -> None:
    root = logging.getLogger("mfschrod")
    root.setLevel(level.upper())
    if any(isinstance(h, RichHandler) for h in root.handlers):
        return
    handler = RichHandler(show_path=False, markup=False, rich_tracebacks=False)
    handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
    root.addHandler(handler)
    root.propagate = False
