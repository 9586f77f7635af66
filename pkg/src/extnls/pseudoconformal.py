"""Pseudoconformal change of variables, cone slices, radial energy
density, cone energy, and the monotonicity audit.

The transform u(t,x) = t^{-n/2} U(-1/t, x/t) e^{i|x|^2/4t} maps the
region t >= 1, |x| >= 1 to -1 <= T < 0, R >= -T.  The cone energy
E(T) = int_{-T}^{inf} e(T,R) dR of the radial energy density

    e(T,R) = R^{n-1} ( |U_R|^2 / 2 + |U|^{p+1} / (p+1) )

is nonincreasing as T increases to 0 along defocusing radial flows, and
E(-1/t) equals the monotone pseudoconformal energy E1(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import DiscDomain, FieldState, ModelParams
from .functionals import pseudoconformal_energy


@dataclass(frozen=True)
class PCParams:
    """Transform parameters; nu = (n/2)(p-1) - 2 > 0 marks the
    supercritical regime (checked, not assumed)."""

    params: ModelParams

    @property
    def nu(self) -> float:
        return self.params.n / 2.0 * (self.params.p - 1.0) - 2.0

    @property
    def supercritical(self) -> bool:
        return self.nu > 0


@dataclass
class ConeSlice:
    """Transformed field on one slice T = const of the cone R >= -T."""

    T: float
    R_nodes: np.ndarray
    U_values: np.ndarray
    density: np.ndarray
    n: int
    p: float

    @property
    def dR(self) -> float:
        return float(self.R_nodes[1] - self.R_nodes[0])


def _slice_density(T, R, U, n, p, dR):
    """Radial energy density with one-sided wall derivatives (U = 0 at
    both cone walls, images of the Dirichlet boundaries).

    The nonlinear term carries the (-T)^nu weight of the transformed
    equation iU_T + Lap U = (-T)^nu |U|^{p-1}U: only with this weight
    does d/dT of the density close into the divergence identity that
    makes the cone energy nonincreasing.
    """
    nu = (n / 2.0) * (p - 1.0) - 2.0
    padded = np.zeros(len(U) + 4, dtype=complex)
    padded[2:-2] = U
    # fourth-order stencil: the |U_R|^2 term rests on a stationary-phase
    # cancellation that second-order differences break at late times
    U_R = (-padded[4:] + 8.0 * padded[3:-1]
           - 8.0 * padded[1:-3] + padded[:-4]) / (12.0 * dR)
    return R ** (n - 1) * (0.5 * np.abs(U_R) ** 2
                           + (-T) ** nu * np.abs(U) ** (p + 1.0) / (p + 1.0))


def forward_transform(params: ModelParams, state: FieldState) -> ConeSlice:
    """Map a radial snapshot at time t >= 1 to the cone chart.

    The image grid R_j = r_j / t is the exact image of the radial grid,
    so U is evaluated algebraically with no resampling:
        U(T, R) = t^{n/2} u(t, r) e^{-i t R^2 / 4},  T = -1/t, R = r/t.
    """
    if not state.is_radial:
        raise ValueError("pseudoconformal transform is defined for radial states")
    t = state.time
    if t < 1.0 - 1e-12:
        raise ValueError(f"transform requires t >= 1, got t = {t}")
    dom = state.domain
    T = -1.0 / t
    R = dom.nodes / t
    U = t ** (params.n / 2.0) * state.values[0] * np.exp(-0.25j * t * R ** 2)
    dR = dom.dr / t
    e = _slice_density(T, R, U, params.n, params.p, dR)
    return ConeSlice(T=T, R_nodes=R, U_values=U, density=e, n=params.n, p=params.p)


def inverse_transform(params: ModelParams, cone: ConeSlice,
                      domain: DiscDomain) -> FieldState:
    """Exact algebraic inverse of forward_transform on the image grid."""
    t = -1.0 / cone.T
    u = t ** (-params.n / 2.0) * cone.U_values * np.exp(0.25j * t * cone.R_nodes ** 2)
    return FieldState(domain, t, u[None, :])


def cone_energy(cone: ConeSlice) -> float:
    """Trapezoid quadrature of the density over R >= -T, truncated at
    the image of the outer wall.  Wall densities use the one-sided
    derivative of U through the Dirichlet zero."""
    dR = cone.dR
    U = cone.U_values
    R_in = cone.R_nodes[0] - dR      # cone boundary, R = -T
    R_out = cone.R_nodes[-1] + dR
    # second-order one-sided derivative through the zero wall value
    dU_in = (4.0 * U[0] - U[1]) / (2.0 * dR)
    dU_out = (-4.0 * U[-1] + U[-2]) / (2.0 * dR)
    e_in = R_in ** (cone.n - 1) * 0.5 * abs(dU_in) ** 2
    e_out = R_out ** (cone.n - 1) * 0.5 * abs(dU_out) ** 2
    vals = np.concatenate(([e_in], cone.density, [e_out]))
    return float(np.trapezoid(vals, dx=dR))


@dataclass
class MonotonicityReport:
    times: list
    T_values: list
    cone_energies: list
    pc_energies: list
    tolerance: float
    violations: int
    strauss_amplitude_constant: float

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "times": self.times,
            "T_values": self.T_values,
            "cone_energies": self.cone_energies,
            "pc_energies": self.pc_energies,
            "tolerance": self.tolerance,
            "violations": self.violations,
            "strauss_amplitude_constant": self.strauss_amplitude_constant,
            "passed": self.passed,
        }


def monotonicity_audit(trajectory: list, params: ModelParams,
                       rel_tolerance: float = 1e-4) -> MonotonicityReport:
    """Tabulate (T, cone energy) and (t, E1) over all samples with t >= 1
    and flag any increase beyond rel_tolerance of the initial value.

    Also records the fitted discrete Strauss-type amplitude constant
    sup |U(T,X)|^2 |X|^{n-2} / (2 E(-1)) across slices.
    """
    samples = [s for s in trajectory if s.time >= 1.0 - 1e-12]
    if not samples:
        raise ValueError("no samples with t >= 1 in trajectory")
    times, Ts, cones, pcs = [], [], [], []
    amp_sup = 0.0
    for st in samples:
        cone = forward_transform(params, st)
        times.append(st.time)
        Ts.append(cone.T)
        cones.append(cone_energy(cone))
        pcs.append(pseudoconformal_energy(params, st))
        weighted = np.abs(cone.U_values) ** 2 * cone.R_nodes ** (params.n - 2)
        amp_sup = max(amp_sup, float(np.max(weighted)))
    e_initial = cones[0]
    tol = rel_tolerance * abs(e_initial) if e_initial != 0 else rel_tolerance
    violations = sum(1 for a, b in zip(cones, cones[1:]) if b > a + tol)
    violations += sum(1 for a, b in zip(pcs, pcs[1:]) if b > a + tol)
    amp_const = amp_sup / (2.0 * e_initial) if e_initial > 0 else 0.0
    return MonotonicityReport(times=times, T_values=Ts, cone_energies=cones,
                              pc_energies=pcs, tolerance=tol,
                              violations=violations,
                              strauss_amplitude_constant=amp_const)
