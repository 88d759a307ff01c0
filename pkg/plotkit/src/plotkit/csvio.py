"""Reader for the simulator's CSV contract.

Files start with a `# units: t=<fs|ns>` comment, then a header row and
comma-separated float rows. Sweep files carry `<name>_converged` 0/1
columns next to each steady-value column.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DataError(ValueError):
    """Missing/empty input or a column absent from the header."""


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: np.ndarray  # (n, len(columns)) float
    time_unit: str  # "" when the file declares none

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise DataError(
                f"column {name!r} not in CSV header (have {list(self.columns)})"
            )
        return self.rows[:, self.columns.index(name)]

    def converged_mask(self, name: str) -> np.ndarray:
        """Per-row convergence flags for a sweep column; all-True when absent."""
        flag = f"{name}_converged"
        if flag in self.columns:
            return self.column(flag) > 0.5
        return np.ones(self.rows.shape[0], dtype=bool)


def read_table(path) -> Table:
    path = Path(path)
    if not path.exists():
        raise DataError(f"input CSV not found: {path}")
    time_unit = ""
    with open(path) as f:
        lines = [ln.rstrip("\n") for ln in f]
    if lines and lines[0].startswith("#"):
        comment = lines.pop(0)
        if "t=" in comment:
            time_unit = comment.split("t=", 1)[1].strip()
    if not lines:
        raise DataError(f"{path}: no header row")
    columns = tuple(c.strip() for c in lines.pop(0).split(","))
    rows = []
    for ln in lines:
        if not ln.strip():
            continue
        cells = ln.split(",")
        # trailing free-text columns (sweep `error`) read as nan
        rows.append([_to_float(c) for c in cells[: len(columns)]])
    if not rows:
        raise DataError(f"{path}: no data rows")
    return Table(columns, np.array(rows, dtype=float), time_unit)


def _to_float(cell: str) -> float:
    try:
        return float(cell)
    except ValueError:
        return float("nan")
