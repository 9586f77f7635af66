"""Problem parameters, radial discretization of the exterior domain,
quadrature, and complex field storage.

The spatial domain is the exterior of the unit ball, truncated at an
artificial outer Dirichlet wall r_max.  The radial grid is uniform on
(1, r_max) with the field implicitly zero at both walls.  For n = 2 an
optional equispaced angular grid (power-of-two size) supports non-radial
fields via Fourier collocation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class ModelParams:
    """Physical problem description.

    n: spatial dimension (>= 2)
    p: defocusing nonlinearity power (> 1)
    r_max: truncation radius of the artificial outer wall (> 1)
    r_inner: inner boundary radius, always 1
    """

    n: int
    p: float
    r_max: float
    r_inner: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension n must be an integer >= 2, got {self.n}")
        if not self.p > 1:
            raise ValueError(f"nonlinearity power p must be > 1, got {self.p}")
        if self.r_inner != 1.0:
            raise ValueError("inner boundary radius is fixed at 1")
        if not self.r_max > self.r_inner:
            raise ValueError(f"r_max must exceed 1, got {self.r_max}")

    @property
    def m_smooth(self) -> int:
        """Regularity index floor(n/2) + 1."""
        return self.n // 2 + 1

    @property
    def symmetrization_constant(self) -> float:
        """(n-1)(n-3)/4: inverse-square potential left by u -> r^{(n-1)/2} u."""
        return (self.n - 1) * (self.n - 3) / 4.0


class Representation(Enum):
    """Angular storage of a 2-d field: Fourier modes or collocation points."""

    ANGULAR_MODES = "modes"
    ANGULAR_POINTS = "points"


@dataclass(frozen=True)
class DiscDomain:
    """Uniform radial grid on (1, r_max) with trapezoid quadrature.

    nodes[0] = 1 + dr and nodes[-1] = r_max - dr; the walls carry the
    Dirichlet zeros and are not stored.  quad_weights[j] integrates a
    field sample against the measure r^{n-1} dr times the angular
    measure carried by one stored angular slot (the full sphere for
    radial storage, 2*pi/num_angular per collocation point for n = 2).
    """

    params: ModelParams
    num_radial: int
    num_angular: int
    dr: float
    nodes: np.ndarray
    quad_weights: np.ndarray

    def __post_init__(self):
        self.nodes.flags.writeable = False
        self.quad_weights.flags.writeable = False

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def angular_measure(self) -> float:
        """Total angular measure spread across the stored angular slots."""
        if self.num_angular == 1:
            return sphere_area(self.params.n)
        return 2.0 * math.pi

    def integrate_samples(self, samples: np.ndarray) -> float:
        """Integrate real per-node samples of shape (num_angular, num_radial)
        (or (num_radial,)) over the domain, walls contributing zero."""
        samples = np.atleast_2d(samples)
        return float(np.sum(samples @ self.quad_weights))

    def integrate_radial_function(self, f) -> float:
        """Integrate a raw radial function over 1 < r < r_max against
        r^{n-1} dr and the full angular measure, trapezoid rule with the
        wall values supplied by f itself (no Dirichlet convention)."""
        r_full = np.concatenate(([1.0], self.nodes, [self.params.r_max]))
        vals = np.asarray([f(r) for r in r_full], dtype=float)
        integrand = vals * r_full ** (self.params.n - 1)
        return sphere_area(self.params.n) * float(np.trapezoid(integrand, dx=self.dr))

    def outer_shell_mask(self, fraction: float = 0.1) -> np.ndarray:
        """Boolean node mask of the outer `fraction` of the domain."""
        return self.nodes >= (1.0 - fraction) * self.params.r_max


@dataclass
class FieldState:
    """Complex field sampled on a DiscDomain at one time.

    values has shape (num_angular, num_radial).  For n = 2 multi-mode
    fields the representation records whether rows are Fourier modes
    (index ordering of numpy.fft) or collocation points.
    """

    domain: DiscDomain
    time: float
    values: np.ndarray
    representation: Representation = Representation.ANGULAR_POINTS

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim == 1:
            self.values = self.values[None, :]
        expected = (self.domain.num_angular, self.domain.num_radial)
        if self.values.shape != expected:
            raise ValueError(
                f"field shape {self.values.shape} does not match domain {expected}"
            )

    @property
    def is_radial(self) -> bool:
        return self.domain.num_angular == 1

    def copy(self) -> "FieldState":
        return FieldState(self.domain, self.time, self.values.copy(), self.representation)

    def to_points(self) -> "FieldState":
        if self.is_radial or self.representation is Representation.ANGULAR_POINTS:
            return FieldState(self.domain, self.time, self.values.copy(),
                              Representation.ANGULAR_POINTS)
        pts = np.fft.ifft(self.values * self.domain.num_angular, axis=0)
        return FieldState(self.domain, self.time, pts, Representation.ANGULAR_POINTS)

    def to_modes(self) -> "FieldState":
        if self.is_radial or self.representation is Representation.ANGULAR_MODES:
            return FieldState(self.domain, self.time, self.values.copy(),
                              Representation.ANGULAR_MODES)
        modes = np.fft.fft(self.values, axis=0) / self.domain.num_angular
        return FieldState(self.domain, self.time, modes, Representation.ANGULAR_MODES)


def build_domain(params: ModelParams, num_radial: int, num_angular: int = 1) -> DiscDomain:
    """Construct the uniform radial grid and quadrature weights.

    num_radial interior nodes give dr = (r_max - 1)/(num_radial + 1).
    For n != 2 only num_angular = 1 is allowed; for n = 2 the angular
    count must be 1 or a power of two.
    """
    if num_radial < 3:
        raise ValueError(f"need at least 3 radial nodes, got {num_radial}")
    if num_angular < 1:
        raise ValueError("num_angular must be >= 1")
    if num_angular > 1:
        if params.n != 2:
            raise ValueError("angular collocation is only supported for n = 2")
        if num_angular & (num_angular - 1) != 0:
            raise ValueError(f"num_angular must be a power of two, got {num_angular}")
    dr = (params.r_max - 1.0) / (num_radial + 1)
    nodes = 1.0 + dr * np.arange(1, num_radial + 1)
    if num_angular == 1:
        angular = sphere_area(params.n)
    else:
        angular = 2.0 * math.pi / num_angular
    weights = angular * dr * nodes ** (params.n - 1)
    return DiscDomain(params=params, num_radial=num_radial, num_angular=num_angular,
                      dr=dr, nodes=nodes, quad_weights=weights)


def sample_radial(domain: DiscDomain, f) -> FieldState:
    """Sample a radial function onto the grid at time 0."""
    vals = np.asarray(f(domain.nodes), dtype=complex)
    vals = np.broadcast_to(vals, (domain.num_radial,)).copy()
    if not np.all(np.isfinite(vals)):
        raise ValueError("initial profile produced non-finite samples")
    full = np.zeros((domain.num_angular, domain.num_radial), dtype=complex)
    full[0, :] = vals
    rep = Representation.ANGULAR_MODES if domain.num_angular > 1 else Representation.ANGULAR_POINTS
    return FieldState(domain, 0.0, full, rep)
