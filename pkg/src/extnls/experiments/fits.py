"""Least-squares fits and audits over sampled diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class FitResult:
    exponent: float
    confidence_halfwidth: float
    window: tuple
    residual: float

    def to_dict(self) -> dict:
        return {"exponent": self.exponent,
                "confidence_halfwidth": self.confidence_halfwidth,
                "window": list(self.window),
                "residual": self.residual}


def loglog_slope(x: np.ndarray, y: np.ndarray):
    """Least-squares slope of log y vs log x with standard error and RMS
    residual."""
    lx, ly = np.log(x), np.log(y)
    A = np.vstack([lx, np.ones_like(lx)]).T
    coeffs, res, _, _ = np.linalg.lstsq(A, ly, rcond=None)
    slope = float(coeffs[0])
    fitted = A @ coeffs
    resid = ly - fitted
    rms = float(np.sqrt(np.mean(resid ** 2)))
    dof = max(len(lx) - 2, 1)
    var = np.sum(resid ** 2) / dof
    denom = np.sum((lx - lx.mean()) ** 2)
    se = math.sqrt(var / denom) if denom > 0 else math.inf
    return slope, 2.0 * se, rms


def decay_fit(times, amplitudes, window) -> FitResult:
    """Fit the envelope exponent: slope of log(sup-weighted amplitude)
    vs log t over the window.  Requires at least 8 samples."""
    t = np.asarray(times, dtype=float)
    a = np.asarray(amplitudes, dtype=float)
    t0, t1 = window
    if t0 >= t1:
        raise ValueError("empty fit window")
    mask = (t >= t0) & (t <= t1) & (a > 0)
    if mask.sum() < 8:
        raise ValueError(f"need at least 8 positive samples in window, got {mask.sum()}")
    slope, hw, rms = loglog_slope(t[mask], a[mask])
    return FitResult(exponent=slope, confidence_halfwidth=hw,
                     window=(t0, t1), residual=rms)


def log_growth_criterion(times, values, curvature_tol: float):
    """At-most-linear growth test for log(values): the mean second
    difference of the log-series per unit time^2 must not exceed
    curvature_tol.  Returns (passed, mean_curvature)."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if np.any(v <= 0):
        raise ValueError("log-growth criterion needs positive values")
    if len(v) < 3:
        raise ValueError("need at least 3 samples")
    dt = t[1] - t[0]
    logv = np.log(v)
    d2 = np.diff(logv, 2) / dt ** 2
    curvature = float(np.mean(d2))
    return curvature <= curvature_tol, curvature


def stability_fit(times, energy_series, initial_budget, curvature_tol: float):
    """Fit the smallest C >= 0 with E(w(t)) <= C e^{Ct} * budget, where
    budget = E(w(0)) + |w(0)|_{L2}^2, and run the log-growth criterion.

    Returns dict with C_growth, pass flag, and the curvature statistic.
    An identically-zero series passes with the C = 0 flag.
    """
    t = np.asarray(times, dtype=float)
    e = np.asarray(energy_series, dtype=float)
    if initial_budget <= 0 or np.max(e) == 0:
        return {"C_growth": 0.0, "pass": True, "zero_series": True,
                "log_curvature": 0.0}
    floor = np.max(e) * 1e-14
    e = np.maximum(e, floor)

    def excess(c):
        return float(np.max(e / (initial_budget * np.exp(c * t)))) - c

    lo, hi = 0.0, 1.0
    while excess(hi) > 0 and hi < 1e6:
        hi *= 2.0
    if excess(hi) > 0:
        return {"C_growth": math.inf, "pass": False, "zero_series": False,
                "log_curvature": math.inf}
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    passed, curvature = log_growth_criterion(t, e, curvature_tol)
    return {"C_growth": hi, "pass": bool(passed), "zero_series": False,
            "log_curvature": curvature}


def noninflation_ratios(records, orders, split_time, ratio_max):
    """sup of H^k over t > split_time divided by sup over t <= split_time,
    using only valid records.  Returns {order: {"ratio": r, "pass": bool}}."""
    out = {}
    valid = [rec for rec in records if rec.valid]
    early = [rec for rec in valid if rec.time <= split_time]
    late = [rec for rec in valid if rec.time > split_time]
    for k in orders:
        if not early or not late:
            out[k] = {"ratio": math.nan, "pass": False, "skipped": True}
            continue
        num = max(rec.sobolev[k] for rec in late)
        den = max(rec.sobolev[k] for rec in early)
        if den == 0:
            out[k] = {"ratio": math.nan, "pass": num == 0, "skipped": True}
            continue
        ratio = num / den
        out[k] = {"ratio": ratio, "pass": bool(ratio <= ratio_max),
                  "skipped": False}
    return out
