"""Versioned CSV loading for the scan outputs.

The data contract is plain CSV with a leading ``# schema_version: N`` line and
a header row; numbers use '.' decimals, booleans are ``true``/``false`` and
missing values are ``nan``.  Only the documented columns are read.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

SUPPORTED_SCHEMA = 1


class SchemaError(RuntimeError):
    """Input does not carry a supported schema_version."""


@dataclass
class Table:
    columns: list[str]
    rows: list[list[str]]

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise SchemaError(f"required column {name!r} missing from input")
        i = self.columns.index(name)
        out = np.empty(len(self.rows))
        for r, row in enumerate(self.rows):
            cell = row[i]
            if cell == "true":
                out[r] = 1.0
            elif cell == "false":
                out[r] = 0.0
            else:
                try:
                    out[r] = float(cell)
                except ValueError:
                    out[r] = np.nan
        return out

    def text_column(self, name: str) -> list[str]:
        if name not in self.columns:
            raise SchemaError(f"required column {name!r} missing from input")
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def load_csv(path: str | Path) -> Table:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
        if not first.startswith("# schema_version:"):
            raise SchemaError(f"{path.name}: missing schema_version header line")
        try:
            version = int(first.split(":", 1)[1])
        except ValueError:
            raise SchemaError(f"{path.name}: malformed schema_version {first!r}")
        if version != SUPPORTED_SCHEMA:
            raise SchemaError(
                f"{path.name}: schema_version {version} unsupported "
                f"(this renderer reads version {SUPPORTED_SCHEMA})"
            )
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    return Table(header, rows)


def load_husimi(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read a Husimi dump: axis header comments followed by the value matrix."""
    path = Path(path)
    re_axis = im_axis = None
    values = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("# re_axis:"):
                re_axis = np.array([float(x) for x in line.split(":", 1)[1].split()])
            elif line.startswith("# im_axis:"):
                im_axis = np.array([float(x) for x in line.split(":", 1)[1].split()])
            elif line and not line.startswith("#"):
                values.append([float(x) for x in line.split()])
    if re_axis is None or im_axis is None or not values:
        raise SchemaError(f"{path.name}: not a Husimi dump (axis headers missing)")
    return re_axis, im_axis, np.array(values)
