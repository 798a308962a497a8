"""Figure rendering for sgiphonon CSV outputs (mode spectra and size scalings)."""

__version__ = "0.1.0"

from .csvdata import CsvTable, read_csv
from .recipe import FigureRecipe, load_recipe
from .render import RenderSummary, render
