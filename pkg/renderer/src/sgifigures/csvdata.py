"""Reader for the '#'-headed CSV files the sgiphonon CLI emits."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class CsvTable:
    columns: list
    data: dict                      # column name -> float ndarray
    metadata: dict = field(default_factory=dict)

    def __getitem__(self, name) -> np.ndarray:
        if name not in self.data:
            raise KeyError(f"CSV is missing the required column {name!r} "
                           f"(has: {', '.join(self.columns)})")
        return self.data[name]

    def __contains__(self, name) -> bool:
        return name in self.data

    def require(self, *names) -> None:
        missing = [n for n in names if n not in self.data]
        if missing:
            raise KeyError(f"CSV is missing required columns: {', '.join(missing)}")


def read_csv(path) -> CsvTable:
    """Parse metadata ('# key = value' lines), the header row, and numeric rows.

    A file with no data rows raises ValueError (nothing to plot).
    """
    metadata = {}
    columns = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if "=" in body:
                    key, _, val = body.partition("=")
                    metadata[key.strip()] = val.strip()
                continue
            if columns is None:
                columns = [c.strip() for c in line.split(",")]
                continue
            rows.append([float(v) for v in line.split(",")])
    if columns is None:
        raise ValueError(f"{path}: no column header found")
    if not rows:
        raise ValueError(f"{path}: no data rows (header only)")
    arr = np.array(rows, dtype=float)
    data = {name: arr[:, i] for i, name in enumerate(columns)}
    return CsvTable(columns=columns, data=data, metadata=metadata)
