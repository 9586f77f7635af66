"""Scalar diagnostics: mass, energy, Strauss quotient, weighted and
Sobolev norms, mixed space-time norms, admissibility, stability energy."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import DiscDomain, FieldState, ModelParams, Representation
from .operators import LaplacianOp, apply_laplacian


@dataclass
class DiagnosticsRecord:
    """One sampled time's functional values."""

    time: float
    mass: float
    energy: float
    pc_energy: float
    strauss_ratio: float
    sup_weighted_amp: float
    sobolev: dict
    linf: float
    outer_mass_fraction: float
    valid: bool = True


@dataclass(frozen=True)
class MixedNormSpec:
    """Mixed space-time norm L^q_t W^{2j,r}_x summed over j + N_t = N."""

    q: float
    r: float
    N: int
    interval: tuple

    def __post_init__(self):
        if not (2.0 <= self.q) or not (2.0 <= self.r):
            raise ValueError("q and r must lie in [2, inf]")
        if self.N < 0:
            raise ValueError("derivative order N must be >= 0")
        if self.interval[0] >= self.interval[1]:
            raise ValueError("empty time interval")


def mass(state: FieldState) -> float:
    """Quadrature of |u|^2 over the domain."""
    dom = state.domain
    if dom.num_angular > 1 and state.representation is Representation.ANGULAR_MODES:
        # Parseval: sum over modes carries the full 2*pi angular measure
        return float(np.sum((np.abs(state.values) ** 2) @ dom.quad_weights)
                     * dom.num_angular)
    return dom.integrate_samples(np.abs(state.values) ** 2)


def _lp_norm(state: FieldState, r: float) -> float:
    """Spatial L^r quadrature norm (points representation for r != 2)."""
    if r == 2:
        return math.sqrt(mass(state))
    st = state.to_points()
    if math.isinf(r):
        return float(np.max(np.abs(st.values)))
    return float(state.domain.integrate_samples(np.abs(st.values) ** r) ** (1.0 / r))


def energy(params: ModelParams, state: FieldState, op: LaplacianOp | None = None) -> float:
    """(1/2) |grad u|_{L^2}^2 + 1/(p+1) |u|_{L^{p+1}}^{p+1}, both by quadrature."""
    if op is None:
        op = LaplacianOp(state.domain)
    grad_sq = op.quadratic_form(state)
    pts = state.to_points()
    pot = state.domain.integrate_samples(np.abs(pts.values) ** (params.p + 1.0))
    return 0.5 * grad_sq + pot / (params.p + 1.0)


def gradient_norm_sq(state: FieldState, op: LaplacianOp | None = None) -> float:
    if op is None:
        op = LaplacianOp(state.domain)
    return op.quadratic_form(state)


def strauss_ratio(state: FieldState, op: LaplacianOp | None = None) -> float:
    """sup_r r^{n/2-1} |u(r)| / |grad u|_{L^2} for radial fields.

    Scale-invariant (degree 0).  Returns NaN for the degenerate 0/0 case;
    callers must surface the flag rather than dropping the record.
    """
    if not state.is_radial:
        raise ValueError("Strauss ratio is defined for radial states only")
    dom = state.domain
    amp = sup_weighted_amplitude(state)
    grad = math.sqrt(max(gradient_norm_sq(state, op), 0.0))
    if grad == 0.0:
        return math.nan
    return amp / grad


def sup_weighted_amplitude(state: FieldState) -> float:
    """sup over nodes of r^{n/2-1} |u|."""
    dom = state.domain
    w = dom.nodes ** (dom.params.n / 2.0 - 1.0)
    pts = state.to_points()
    return float(np.max(w[None, :] * np.abs(pts.values)))


def _radial_derivative(state: FieldState) -> np.ndarray:
    """Fourth-order centered first difference with Dirichlet walls.

    The high order matters for phase-weighted diagnostics like the
    pseudoconformal energy: for a spreading wave the combination
    r*u + 2it*u_r relies on cancellation that a second-order stencil
    misses by O(t k^3 dr^2), which would grow along the trajectory.
    """
    u = state.values
    dr = state.domain.dr
    padded = np.zeros((u.shape[0], u.shape[1] + 4), dtype=complex)
    padded[:, 2:-2] = u
    return (-padded[:, 4:] + 8.0 * padded[:, 3:-1]
            - 8.0 * padded[:, 1:-3] + padded[:, :-4]) / (12.0 * dr)


def pseudoconformal_energy(params: ModelParams, state: FieldState) -> float:
    """Monotone pseudoconformal energy

        E1(t) = int [ (1/8)|(x + 2it grad)u|^2
                      + (t^2/(p+1)) |u|^{p+1} ] dx,

    assembled nodewise from the phase-augmented field r*u + 2it*du/dr.
    The t^2 weight is the image of the (-T)^nu weight that the cone
    energy density needs for its monotonicity identity (the transformed
    equation reads iU_T + Lap U = (-T)^nu |U|^{p-1}U).  At t = 0 the
    functional reduces to (1/8) of the r^2-weighted mass.
    """
    if not state.is_radial:
        raise ValueError("pseudoconformal energy is defined for radial states")
    if state.time < 0:
        raise ValueError("pseudoconformal energy requires time >= 0")
    dom = state.domain
    t = state.time
    du = _radial_derivative(state)
    g = dom.nodes[None, :] * state.values + 2j * t * du
    kinetic = dom.integrate_samples(np.abs(g) ** 2) / 8.0
    potential = (t ** 2 / (params.p + 1.0)
                 * dom.integrate_samples(np.abs(state.values) ** (params.p + 1.0)))
    return kinetic + potential


def sobolev_norm(state: FieldState, k: int, op: LaplacianOp | None = None) -> float:
    """Discrete H^k norm via quadratic forms of powers of the Laplacian:

        |u|_{H^k}^2 = sum_{m=0}^{k} <(-Lap)^m u, u>.

    Odd powers are the forms <(-Lap)^{(m-1)/2} u, (-Lap)^{(m+1)/2} u>,
    guaranteed nonnegative by symmetry.
    """
    if k not in (0, 1, 2, 3, 4):
        raise ValueError(f"Sobolev order k must be in 0..4, got {k}")
    if op is None:
        op = LaplacianOp(state.domain)
    st = state.to_modes() if state.domain.num_angular > 1 else state
    v = op.symmetrize(st.values)
    scale = op._mode_weight() * state.domain.dr
    powers = [v]
    for _ in range((k + 1) // 2):
        powers.append(-op._apply_sym(powers[-1]))
    total = 0.0
    for m in range(k + 1):
        lo, hi = m // 2, (m + 1) // 2
        total += scale * float(np.real(np.vdot(powers[hi], powers[lo])))
    return math.sqrt(max(total, 0.0))


def _sobolev_even_lp(state: FieldState, j: int, r: float, op: LaplacianOp) -> float:
    """W^{2j,r} spatial norm: sum of L^r norms of (-Lap)^i u, i <= j."""
    total = 0.0
    cur = state
    for i in range(j + 1):
        total += _lp_norm(cur, r)
        if i < j:
            cur = apply_laplacian(op, cur)
    return total


def mixed_norm(trajectory: list, spec: MixedNormSpec, params: ModelParams) -> float:
    """Mixed space-time norm over a uniformly sampled trajectory:

        sum_{j=0}^{N} | d_t^{N-j} u |_{L^q_I W^{2j,r}}.

    Time derivatives (N <= 1) are evaluated through the equation,
    d_t u = i(Lap u - |u|^{p-1} u), not by differencing snapshots.
    """
    if not trajectory:
        raise ValueError("empty trajectory")
    if spec.N > 1:
        raise ValueError("mixed norms are supported for N <= 1")
    t0, t1 = spec.interval
    samples = [s for s in trajectory if t0 - 1e-12 <= s.time <= t1 + 1e-12]
    if len(samples) < 2 and not math.isinf(spec.q):
        raise ValueError("need at least two samples inside the interval")
    if not samples:
        raise ValueError("no samples inside the interval")
    op = LaplacianOp(samples[0].domain)

    def time_derivative(st: FieldState) -> FieldState:
        lap = apply_laplacian(op, st)
        pts = st.to_points()
        f = np.abs(pts.values) ** (params.p - 1.0) * pts.values
        fst = FieldState(st.domain, st.time, f, Representation.ANGULAR_POINTS)
        if st.domain.num_angular > 1:
            fst = fst.to_modes()
        return FieldState(st.domain, st.time, 1j * (lap.to_modes().values - fst.values)
                          if st.domain.num_angular > 1 else 1j * (lap.values - f),
                          lap.representation)

    total = 0.0
    for j in range(spec.N + 1):
        n_t = spec.N - j
        series = []
        for st in samples:
            cur = st
            for _ in range(n_t):
                cur = time_derivative(cur)
            series.append(_sobolev_even_lp(cur, j, spec.r, op))
        series = np.asarray(series)
        if math.isinf(spec.q):
            total += float(np.max(series))
        else:
            times = np.asarray([s.time for s in samples])
            total += float(np.trapezoid(series ** spec.q, times) ** (1.0 / spec.q))
    return total


def check_admissible(n: int, q: float, r: float, tol: float = 1e-12):
    """Strichartz admissibility 2/q + n/r = n/2; flags the endpoint
    (2, 2n/(n-2)) (r = inf for n = 2, excluded by the r < inf rule)."""
    if not (2.0 <= q) or not (2.0 <= r):
        raise ValueError("q and r must lie in [2, inf]")
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    inv_r = 0.0 if math.isinf(r) else 1.0 / r
    admissible = abs(2.0 * inv_q + n * inv_r - n / 2.0) < tol
    if n == 2:
        endpoint = abs(q - 2.0) < tol and math.isinf(r)
    else:
        endpoint = abs(q - 2.0) < tol and abs(r - 2.0 * n / (n - 2.0)) < tol
    if n == 2 and math.isinf(r):
        admissible = False  # r < inf restriction at n = 2
    return admissible, endpoint


@dataclass
class StabilityEnergy:
    energy: float
    l2_squared: float


def stability_energy(params: ModelParams, u: FieldState, v: FieldState,
                     op: LaplacianOp | None = None) -> StabilityEnergy:
    """Energy E(w) and |w|_{L^2}^2 of the difference w = v - u."""
    if u.domain is not v.domain:
        raise ValueError("states live on different domains")
    if abs(u.time - v.time) > 1e-12:
        raise ValueError("states are at different times")
    if u.representation is not v.representation:
        v = v.to_points() if u.representation is Representation.ANGULAR_POINTS else v.to_modes()
    w = FieldState(u.domain, u.time, v.values - u.values, u.representation)
    return StabilityEnergy(energy=energy(params, w, op), l2_squared=mass(w))


def compute_diagnostics(params: ModelParams, state: FieldState,
                        op: LaplacianOp | None = None,
                        horizon_fraction: float = 1e-6) -> DiagnosticsRecord:
    """Assemble the full per-snapshot diagnostics record."""
    if op is None:
        op = LaplacianOp(state.domain)
    dom = state.domain
    pts = state.to_points()
    m = mass(state)
    mask = dom.outer_shell_mask()
    outer = dom.integrate_samples(np.abs(pts.values) ** 2 * mask[None, :])
    frac = outer / m if m > 0 else 0.0
    sob = {k: sobolev_norm(state, k, op) for k in (0, 1, 2, 4)}
    if state.is_radial:
        sr = strauss_ratio(state, op)
        pc = pseudoconformal_energy(params, state) if state.time >= 0 else math.nan
    else:
        sr = math.nan
        pc = math.nan
    return DiagnosticsRecord(
        time=state.time,
        mass=m,
        energy=energy(params, state, op),
        pc_energy=pc,
        strauss_ratio=sr,
        sup_weighted_amp=sup_weighted_amplitude(state),
        sobolev=sob,
        linf=float(np.max(np.abs(pts.values))),
        outer_mass_fraction=frac,
        valid=bool(frac < horizon_fraction),
    )
