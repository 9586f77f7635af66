"""Boundary compatibility sequences for higher time-regularity.

The recursion h_0 = u0, h_j = -i (d_t^{j-1} F(0) - Lap h_{j-1}) (linear
forcing F) or its nonlinear analogue with f(u) = |u|^{p-1} u decides
whether data admit order-N regularity; discretely only the vanishing of
the boundary trace at r = 1 is meaningful, estimated by quadratic
extrapolation of the three nodes nearest the wall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import DiscDomain, FieldState, ModelParams
from .operators import LaplacianOp, apply_laplacian
from .functionals import sobolev_norm

TRACE_TOLERANCE_FACTOR = 10.0


@dataclass
class CompatReport:
    """Traces and verdicts for the first N members of a sequence."""

    order_requested: int
    traces: list          # (j, boundary trace magnitude)
    passes: list          # bool per j
    tolerances: list      # tolerance per j
    psi_fields: list      # the computed h_j / psi_j FieldStates

    @property
    def passed(self) -> bool:
        return all(self.passes)

    def to_dict(self) -> dict:
        return {
            "order_requested": self.order_requested,
            "traces": [[j, mag] for j, mag in self.traces],
            "passes": [bool(b) for b in self.passes],
            "tolerances": self.tolerances,
            "passed": self.passed,
        }


def boundary_trace(state: FieldState) -> complex:
    """Quadratic extrapolation of the field to the inner wall r = 1."""
    u = state.to_points().values[0] if not state.is_radial else state.values[0]
    return complex(3.0 * u[0] - 3.0 * u[1] + u[2])


def _trace_entry(h: FieldState, j: int, op: LaplacianOp):
    mag = abs(boundary_trace(h))
    scale = sobolev_norm(h, 1, op)
    tol = TRACE_TOLERANCE_FACTOR * h.domain.dr ** 2 * scale
    return (j, mag), mag <= tol, tol


def _time_derivative_at_zero(slab: list, order: int) -> FieldState:
    """Forward finite difference d_t^order at the first slab sample."""
    if order == 0:
        return slab[0]
    if len(slab) < order + 1:
        raise ValueError(f"slab too short for time derivative of order {order}")
    dt = slab[1].time - slab[0].time
    if dt <= 0:
        raise ValueError("slab samples must be strictly increasing in time")
    acc = np.zeros_like(slab[0].values)
    for i in range(order + 1):
        acc = acc + (-1.0) ** (order - i) * math.comb(order, i) * slab[i].values
    return FieldState(slab[0].domain, slab[0].time, acc / dt ** order,
                      slab[0].representation)


def linear_compat_sequence(u0: FieldState, forcing_slab: list | None,
                           N: int) -> CompatReport:
    """h_0 = u0, h_j = -i (d_t^{j-1} F(0) - Lap h_{j-1}); trace check for
    j = 0 .. N-1.  forcing_slab is a uniformly spaced list of FieldStates
    starting at t = 0, or None for F = 0."""
    if N < 1:
        raise ValueError("order N must be >= 1")
    op = LaplacianOp(u0.domain)
    zero = FieldState(u0.domain, 0.0, np.zeros_like(u0.values), u0.representation)
    fields, traces, passes, tols = [], [], [], []
    h = u0
    for j in range(N):
        if j > 0:
            dF = _time_derivative_at_zero(forcing_slab, j - 1) if forcing_slab else zero
            h = FieldState(u0.domain, 0.0,
                           -1j * (dF.values - apply_laplacian(op, h).values),
                           u0.representation)
        entry, ok, tol = _trace_entry(h, j, op)
        fields.append(h)
        traces.append(entry)
        passes.append(ok)
        tols.append(tol)
    return CompatReport(N, traces, passes, tols, fields)


def _df_coefficients(z: np.ndarray, p: float):
    """Wirtinger derivatives of f(z) = |z|^{p-1} z at z, extended by 0."""
    a = (p + 1.0) / 2.0
    b = (p - 1.0) / 2.0
    absz = np.abs(z)
    nonzero = absz > 0
    def safe(power):
        out = np.zeros_like(z, dtype=complex)
        out[nonzero] = absz[nonzero] ** power
        return out
    f_u = a * safe(p - 1.0)
    f_ub = b * safe(p - 3.0) * z ** 2
    f_uu = a * (a - 1.0) * safe(p - 3.0) * np.conj(z)
    f_uub = a * b * safe(p - 3.0) * z
    f_ubub = b * (b - 1.0) * safe(p - 5.0) * z ** 3
    return f_u, f_ub, f_uu, f_uub, f_ubub


def nonlinear_compat_sequence(params: ModelParams, u0: FieldState,
                              N: int) -> CompatReport:
    """psi_0 = u0, psi_j = -i (d_t^{j-1} f(u)|_0 - Lap psi_{j-1}) with the
    chain rule expanded explicitly and d_t^k u(0) replaced by psi_k."""
    if N < 1:
        raise ValueError("order N must be >= 1")
    if N > 3:
        raise ValueError("explicit chain-rule expansion is capped at N = 3")
    if not params.p > 2 * N:
        raise ValueError(f"need p > 2N for order {N}, got p = {params.p}")
    op = LaplacianOp(u0.domain)
    z = u0.values
    f_u, f_ub, f_uu, f_uub, f_ubub = _df_coefficients(z, params.p)
    f0 = np.abs(z) ** (params.p - 1.0) * z

    psi = [u0]
    fields, traces, passes, tols = [], [], [], []
    for j in range(N):
        if j > 0:
            if j == 1:
                dtf = f0
            elif j == 2:
                p1 = psi[1].values
                dtf = f_u * p1 + f_ub * np.conj(p1)
            else:
                p1, p2 = psi[1].values, psi[2].values
                dtf = (f_u * p2 + f_ub * np.conj(p2)
                       + f_uu * p1 ** 2 + 2.0 * f_uub * (p1 * np.conj(p1))
                       + f_ubub * np.conj(p1) ** 2)
            h = FieldState(u0.domain, 0.0,
                           -1j * (dtf - apply_laplacian(op, psi[j - 1]).values),
                           u0.representation)
            psi.append(h)
        entry, ok, tol = _trace_entry(psi[j], j, op)
        fields.append(psi[j])
        traces.append(entry)
        passes.append(ok)
        tols.append(tol)
    return CompatReport(N, traces, passes, tols, fields)
