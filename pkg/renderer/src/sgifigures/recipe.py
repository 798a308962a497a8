"""Declarative figure recipes (small JSON files)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

MODE_SPECTRUM = "mode-spectrum"
CONTRAST_SCALING = "contrast-scaling"
KINDS = (MODE_SPECTRUM, CONTRAST_SCALING)

DEFAULT_STYLE = {
    "figsize": [6.4, 4.2],
    "dpi": 150,
    "colors": ["#1f77b4", "#d62728", "#2ca02c"],
    "shade_color": "0.85",
    "quantum_color": "#4b0082",
    "grid": True,
}


@dataclass
class FigureRecipe:
    kind: str
    csv: str
    threshold: float = 0.1            # contrast level shaded in scaling plots
    protocols: tuple = (0, 1, 2)
    title: str = ""
    x_label: str = ""
    y_label: str = ""
    show_exact: bool = True           # scaling plots: symbols of the exact sums
    annotate_slopes: bool = True
    style: dict = field(default_factory=lambda: dict(DEFAULT_STYLE))

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"figure kind must be one of {KINDS}, got {self.kind!r}")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("shading threshold must be a contrast in (0, 1)")
        self.protocols = tuple(int(n) for n in self.protocols)
        if any(n not in (0, 1, 2) for n in self.protocols) or not self.protocols:
            raise ValueError("protocols must be a non-empty subset of {0, 1, 2}")
        style = dict(DEFAULT_STYLE)
        style.update(self.style or {})
        self.style = style


def load_recipe(path) -> FigureRecipe:
    """Read a recipe JSON; the csv path is resolved relative to the recipe file."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    known = {f for f in FigureRecipe.__dataclass_fields__}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"{path}: unknown recipe keys: {sorted(unknown)}")
    recipe = FigureRecipe(**raw)
    csv_path = Path(recipe.csv)
    if not csv_path.is_absolute():
        recipe.csv = str((path.parent / csv_path).resolve())
    return recipe
