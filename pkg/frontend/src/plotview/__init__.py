"""Figures from run directories (diagnostics.csv + report.json only)."""

__version__ = "0.1.0"

from .figures import KINDS, FigureSpec, render
from .io import RunData, RunDataError, load_run

__all__ = ["KINDS", "FigureSpec", "render", "RunData", "RunDataError",
           "load_run"]
