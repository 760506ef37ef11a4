"""
cli/csv_io.py
CSV emission for every table the library produces.

Floats are written with pandas' default repr (shortest string that reads
back to the same double), so write-then-read is exact.
"""
import logging
from pathlib import Path
from typing import Mapping, Sequence, Union

import pandas as pd

from ..errors import DomainError

logger = logging.getLogger(__name__)

Table = Union[pd.DataFrame, Mapping[str, Sequence[float]]]


def emit_csv(table: Table, path) -> Path:
    """Header row, then data rows, UTF-8, '\\n' line endings."""
    if isinstance(table, pd.DataFrame):
        frame = table
    else:
        lengths = {k: len(v) for k, v in table.items()}
        if len(set(lengths.values())) > 1:
            raise DomainError(f"columns have different lengths: {lengths}")
        frame = pd.DataFrame({k: list(v) for k, v in table.items()}, columns=list(table))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    logger.debug("[CSV] wrote %s (%d rows)", path, len(frame))
    return path


def read_csv(path) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")
