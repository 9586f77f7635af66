"""Figure renderers.

Every renderer is a pure function of the run directory's diagnostics.csv
and report.json: fixed styles, no timestamps, and invalid-flagged rows
excluded from all curves and fits (with a legend note when any were
dropped).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import RunData, RunDataError, load_run, loglog_slope  # noqa: E402

KINDS = ("Conservation", "Decay", "Pseudoconformal", "Strichartz",
         "Stability", "NonInflation")
FORMATS = ("svg", "png")

_STYLE = {
    "figure.figsize": (7.0, 4.5),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "svg.hashsalt": "plotview",
    # keep SVG text as text (searchable labels, smaller diffs)
    "svg.fonttype": "none",
}


@dataclass(frozen=True)
class FigureSpec:
    run_dir: Path
    kind: str
    out_path: Path

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind '{self.kind}'; "
                             f"expected one of {KINDS}")
        suffix = Path(self.out_path).suffix.lower().lstrip(".")
        if suffix not in FORMATS:
            raise ValueError(f"output format '{suffix}' not supported; "
                             f"use one of {FORMATS}")


def _minus(value: float, fmt: str = "%.3f") -> str:
    """Typeset negative numbers with a real minus sign."""
    return (fmt % value).replace("-", "−")


def _note_invalid(ax, data: RunData):
    if data.n_invalid:
        ax.plot([], [], " ",
                label=f"{data.n_invalid} invalid samples excluded")


def _fig_conservation(data: RunData):
    t, m, e = data.require("time", "mass", "energy")
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True)
    m_drift = np.max(np.abs(m - m[0])) / m[0] if m[0] else 0.0
    e_drift = np.max(np.abs(e - e[0])) / e[0] if e[0] else 0.0
    ax1.plot(t, m, color="tab:blue", label=f"mass (drift {m_drift:.2e})")
    ax2.plot(t, e, color="tab:orange", label=f"energy (drift {e_drift:.2e})")
    _note_invalid(ax2, data)
    ax1.set_ylabel("mass")
    ax2.set_ylabel("energy")
    ax2.set_xlabel("t")
    ax1.legend(loc="best")
    ax2.legend(loc="best")
    ax1.set_title("Conservation histories")
    return fig


def _decay_window(data: RunData, t):
    extras = data.report.get("extras", {}) if data.report else {}
    fit = extras.get("decay_fit") or {}
    window = fit.get("window")
    if window:
        return float(window[0]), float(window[1])
    positive = t[t > 0]
    if len(positive) < 2:
        raise RunDataError("decay figure needs at least two samples at t > 0")
    return float(positive[0]), float(positive[-1])


def _fig_decay(data: RunData):
    t, amp = data.require("time", "sup_weighted_amp")
    t0, t1 = _decay_window(data, t)
    mask = (t >= t0) & (t <= t1) & (t > 0) & (amp > 0)
    if mask.sum() < 2:
        raise RunDataError("decay figure: no positive samples in the window")
    slope = loglog_slope(t[mask], amp[mask])
    fig, ax = plt.subplots()
    ax.loglog(t[mask], amp[mask], ".", color="tab:blue", ms=4,
              label="sup-weighted amplitude")
    # fitted power law through the window midpoint
    tm = np.sqrt(t0 * t1)
    am = np.interp(tm, t[mask], amp[mask])
    tt = np.geomspace(t0, t1, 64)
    ax.loglog(tt, am * (tt / tm) ** slope, "-", color="tab:red",
              label=f"fit: slope {_minus(slope)}")
    ax.loglog(tt, am * (tt / tm) ** -1.0, "--", color="0.4",
              label="reference $\\langle t\\rangle^{-1}$")
    _note_invalid(ax, data)
    ax.set_xlabel("t")
    ax.set_ylabel("$\\sup_r\\ r^{n/2-1}|u|$")
    ax.set_title("Envelope decay")
    ax.legend(loc="best")
    return fig


def _fig_pseudoconformal(data: RunData):
    t, e1 = data.require("time", "pc_energy")
    mask = np.isfinite(e1) & (t >= 1.0)
    if not np.any(mask):
        raise RunDataError("pseudoconformal figure needs samples with t >= 1")
    fig, ax = plt.subplots()
    ax.plot(t[mask], e1[mask], "-", color="tab:green", label="$E_1(t)$")
    _note_invalid(ax, data)
    ax.set_xlabel("t")
    ax.set_ylabel("$E_1$")
    ax.set_title("Pseudoconformal energy (monotone for $t \\geq 1$)")
    ax.legend(loc="best")
    return fig


def _fig_strichartz(data: RunData):
    table = (data.report.get("extras") or {}).get("table")
    if not table:
        raise RunDataError("report.json has no extras.table for the "
                           "Strichartz figure")
    fig, ax = plt.subplots()
    pairs = sorted(table)
    resolutions = sorted(
        {m for info in table.values() for m in info["resolutions"]},
        key=int)
    width = 0.8 / max(len(resolutions), 1)
    xs = np.arange(len(pairs), dtype=float)
    for i, m in enumerate(resolutions):
        maxima = [table[p]["resolutions"].get(m, {}).get("max", np.nan)
                  for p in pairs]
        medians = [table[p]["resolutions"].get(m, {}).get("median", np.nan)
                   for p in pairs]
        off = (i - (len(resolutions) - 1) / 2.0) * width
        ax.bar(xs + off, maxima, width * 0.9, label=f"m={m} (max)",
               alpha=0.85)
        ax.plot(xs + off, medians, "k_", ms=12)
    ax.set_xticks(xs)
    ax.set_xticklabels(pairs)
    ax.set_ylabel("quotient")
    ax.set_title("Strichartz quotients: ensemble max (bars), median (ticks)")
    ax.legend(loc="best")
    return fig


def _fig_stability(data: RunData):
    sweep = (data.report.get("extras") or {}).get("sweep")
    if not sweep:
        raise RunDataError("report.json has no extras.sweep for the "
                           "stability figure")
    fig, ax = plt.subplots()
    for entry in sweep:
        times = entry.get("times")
        series = entry.get("energy_series")
        if not times or not series:
            continue
        eps = entry.get("epsilon")
        series = np.maximum(np.asarray(series, dtype=float), 1e-300)
        ax.semilogy(times, series, "-", label=f"$\\epsilon$ = {eps:g}")
        budget = entry.get("budget")
        if budget:
            ax.axhline(budget, color="0.6", lw=0.6, ls=":")
    ax.set_xlabel("t")
    ax.set_ylabel("$E(w(t))$")
    ax.set_title("Stability envelope (dotted: initial budgets)")
    ax.legend(loc="best")
    return fig


def _fig_noninflation(data: RunData):
    t, h1, h2, h4 = data.require("time", "h1", "h2", "h4")
    fig, ax = plt.subplots()
    ax.plot(t, h1, label="$H^1$")
    ax.plot(t, h2, label="$H^2$")
    ax.plot(t, h4, label="$H^4$")
    ratios = (data.report.get("extras") or {}).get("ratios") or {}
    info = ratios.get("2")
    if info and info.get("ratio") is not None:
        ax.set_title(f"Sobolev histories ($H^2$ late/early sup ratio "
                     f"{info['ratio']:.3f})")
    else:
        ax.set_title("Sobolev histories")
    _note_invalid(ax, data)
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    ax.legend(loc="best")
    return fig


_RENDERERS = {
    "Conservation": _fig_conservation,
    "Decay": _fig_decay,
    "Pseudoconformal": _fig_pseudoconformal,
    "Strichartz": _fig_strichartz,
    "Stability": _fig_stability,
    "NonInflation": _fig_noninflation,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure to spec.out_path; returns the written path."""
    data = load_run(spec.run_dir)
    with plt.rc_context(_STYLE):
        fig = _RENDERERS[spec.kind](data)
        fig.tight_layout()
        out = Path(spec.out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        # strip volatile metadata so identical inputs give identical bytes
        fmt = out.suffix.lower().lstrip(".")
        metadata = {"Date": None} if fmt == "svg" else None
        fig.savefig(out, format=fmt, metadata=metadata)
        plt.close(fig)
    return out
