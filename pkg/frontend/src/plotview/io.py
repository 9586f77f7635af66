"""Reading the run-directory contract: diagnostics.csv + report.json.

This package depends only on those two files; it never imports the
solver.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class RunDataError(ValueError):
    pass


@dataclass
class RunData:
    """Parsed run directory: column arrays plus the JSON report."""

    run_dir: Path
    columns: dict          # name -> float ndarray (all rows)
    valid: np.ndarray      # boolean mask
    report: dict

    def require(self, *names):
        """Return the requested columns restricted to valid rows; name the
        missing column in the error."""
        for name in names:
            if name not in self.columns:
                raise RunDataError(
                    f"diagnostics.csv is missing required column '{name}'")
        return tuple(self.columns[name][self.valid] for name in names)

    @property
    def n_invalid(self) -> int:
        return int((~self.valid).sum())


def load_run(run_dir) -> RunData:
    run_dir = Path(run_dir)
    csv_path = run_dir / "diagnostics.csv"
    report_path = run_dir / "report.json"
    if not csv_path.exists():
        raise RunDataError(f"no diagnostics.csv in {run_dir}")
    if not report_path.exists():
        raise RunDataError(f"no report.json in {run_dir}")
    try:
        report = json.loads(report_path.read_text())
    except json.JSONDecodeError as exc:
        raise RunDataError(f"report.json is not valid JSON: {exc}") from None

    with open(csv_path) as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RunDataError("diagnostics.csv is empty") from None
        rows = [[float(x) for x in row] for row in reader if row]
    if not rows:
        raise RunDataError("diagnostics.csv has no data rows")
    data = np.asarray(rows, dtype=float)
    columns = {name: data[:, i] for i, name in enumerate(header)}
    if "valid" in columns:
        valid = columns["valid"] > 0.5
    else:
        valid = np.ones(len(data), dtype=bool)
    return RunData(run_dir=run_dir, columns=columns, valid=valid,
                   report=report)


def loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log y against log x."""
    mask = (x > 0) & (y > 0)
    if mask.sum() < 2:
        raise RunDataError("need at least two positive samples for a "
                           "log-log fit")
    lx, ly = np.log(x[mask]), np.log(y[mask])
    A = np.vstack([lx, np.ones_like(lx)]).T
    coeffs, *_ = np.linalg.lstsq(A, ly, rcond=None)
    return float(coeffs[0])
