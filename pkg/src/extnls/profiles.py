"""Named initial-data library.

Each profile has closed-form derivatives, so compatibility checks and
weighted norms have exact references.  Random ensemble data are seeded
sums of discrete eigenmodes: exactly wall-vanishing along with every
power of the discrete Laplacian, so all compatibility orders pass.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .domain import DiscDomain, FieldState, sample_radial
from .operators import LaplacianOp
from .functionals import mass


def gaussian_ring(amplitude=1.0, power=1, width=1.0):
    """A (r-1)^a exp(-b (r-1)^2)."""
    def f(r):
        s = r - 1.0
        return amplitude * s ** power * np.exp(-width * s ** 2)
    return f


def poly_ring(amplitude=1.0, power=1, rate=1.0):
    """A (r-1)^a exp(-b (r-1))."""
    def f(r):
        s = r - 1.0
        return amplitude * s ** power * np.exp(-rate * s)
    return f


def compact_bump(amplitude=1.0, center=2.0, width=0.5):
    """Smooth compactly supported bump on |r - center| < width."""
    def f(r):
        s = (np.asarray(r, dtype=float) - center) / width
        out = np.zeros_like(s)
        inside = np.abs(s) < 1.0
        out[inside] = amplitude * np.exp(-1.0 / (1.0 - s[inside] ** 2))
        return out
    return f


def eigenmodes(domain: DiscDomain, count: int, mode_index: int = 0):
    """First `count` eigenpairs of the symmetrized radial operator.

    Returns (lams, vecs): lams[k] > 0 with -Lap phi_k = lams[k] phi_k,
    vecs[k] the eigenfunction in u variables, L^2-normalized.
    """
    op = LaplacianOp(domain)
    d = -op.main_diag[mode_index].copy()
    e = -op.off_diag * np.ones(domain.num_radial - 1)
    lams, vecs = eigh_tridiagonal(d, e, select="i",
                                  select_range=(0, count - 1))
    fields = []
    for k in range(count):
        u = op.unsymmetrize(vecs[:, k][None, :].astype(complex))
        st = FieldState(domain, 0.0, u)
        u /= np.sqrt(mass(st))
        fields.append(FieldState(domain, 0.0, u))
    return lams, fields


def eigenmode_sum(domain: DiscDomain, seed: int, count: int = 8) -> FieldState:
    """Seeded random complex combination of the lowest eigenmodes,
    L^2-normalized."""
    rng = np.random.default_rng(seed)
    count = min(count, domain.num_radial)
    _, modes = eigenmodes(domain, count)
    coeffs = rng.standard_normal(count) + 1j * rng.standard_normal(count)
    acc = np.zeros_like(modes[0].values)
    for c, m in zip(coeffs, modes):
        acc = acc + c * m.values
    st = FieldState(domain, 0.0, acc)
    st.values /= np.sqrt(mass(st))
    return st


PROFILE_BUILDERS = {
    "gaussian_ring": gaussian_ring,
    "poly_ring": poly_ring,
    "compact_bump": compact_bump,
}


def make_initial_state(domain: DiscDomain, descriptor: dict) -> FieldState:
    """Build a FieldState from a manifest initial-data descriptor.

    descriptor = {"profile": name, ...profile parameters...}; the
    "eigenmode" profile takes {"index": k, "amplitude": A} and
    "eigenmode_sum" takes {"seed": s, "count": m}.
    """
    desc = dict(descriptor)
    name = desc.pop("profile", None)
    if name is None:
        raise ValueError("initial data descriptor needs a 'profile' key")
    if name == "eigenmode":
        index = int(desc.pop("index", 0))
        amplitude = float(desc.pop("amplitude", 1.0))
        if desc:
            raise ValueError(f"unknown eigenmode keys: {sorted(desc)}")
        _, modes = eigenmodes(domain, index + 1)
        st = modes[index]
        st.values = st.values * amplitude
        return st
    if name == "eigenmode_sum":
        seed = int(desc.pop("seed"))
        count = int(desc.pop("count", 8))
        amplitude = float(desc.pop("amplitude", 1.0))
        if desc:
            raise ValueError(f"unknown eigenmode_sum keys: {sorted(desc)}")
        st = eigenmode_sum(domain, seed, count)
        st.values = st.values * amplitude
        return st
    if name == "zero":
        if desc:
            raise ValueError(f"unknown zero-profile keys: {sorted(desc)}")
        return FieldState(domain, 0.0,
                          np.zeros((domain.num_angular, domain.num_radial)))
    builder = PROFILE_BUILDERS.get(name)
    if builder is None:
        raise ValueError(f"unknown initial data profile '{name}'")
    return sample_radial(domain, builder(**desc))
