import math

import numpy as np
import pytest

from extnls import (ModelParams, Representation, build_domain, sample_radial,
                    FieldState, mass)
from extnls.domain import sphere_area


def test_model_params_validation():
    ModelParams(n=2, p=1.5, r_max=3.0)
    with pytest.raises(ValueError):
        ModelParams(n=1, p=3.0, r_max=3.0)
    with pytest.raises(ValueError):
        ModelParams(n=3, p=1.0, r_max=3.0)
    with pytest.raises(ValueError):
        ModelParams(n=3, p=3.0, r_max=1.0)


def test_model_params_derived_quantities():
    p = ModelParams(n=3, p=10.0, r_max=5.0)
    assert p.m_smooth == 2
    assert p.symmetrization_constant == 0.0  # (n-1)(n-3)/4 vanishes at n=3
    p5 = ModelParams(n=5, p=10.0, r_max=5.0)
    assert p5.symmetrization_constant == 2.0
    assert p5.m_smooth == 3


def test_grid_layout():
    params = ModelParams(n=3, p=10.0, r_max=2.0)
    dom = build_domain(params, 3)
    assert dom.dr == pytest.approx(0.25)
    assert np.allclose(dom.nodes, [1.25, 1.5, 1.75])
    assert np.all(np.diff(dom.nodes) > 0)
    assert dom.nodes[0] == pytest.approx(1.0 + dom.dr)
    assert dom.nodes[-1] == pytest.approx(params.r_max - dom.dr)


def test_build_domain_validation():
    params = ModelParams(n=3, p=10.0, r_max=5.0)
    with pytest.raises(ValueError):
        build_domain(params, 2)
    with pytest.raises(ValueError):
        build_domain(params, 64, num_angular=4)  # angular grid needs n = 2
    params2 = ModelParams(n=2, p=7.0, r_max=5.0)
    with pytest.raises(ValueError):
        build_domain(params2, 64, num_angular=12)  # not a power of two
    build_domain(params2, 64, num_angular=16)


def test_quad_weights_proportional_to_measure(domain3):
    expected = sphere_area(3) * domain3.dr * domain3.nodes ** 2
    assert np.array_equal(domain3.quad_weights, expected)


def test_volume_quadrature_oracle():
    # integral of 1 over 1 < r < 5 in R^3 is (4 pi / 3)(125 - 1)
    params = ModelParams(n=3, p=10.0, r_max=5.0)
    dom = build_domain(params, 4096)
    exact = 4.0 * math.pi / 3.0 * (5.0 ** 3 - 1.0)
    approx = dom.integrate_radial_function(lambda r: 1.0)
    assert abs(approx - exact) / exact < 1e-6


def test_sample_radial_matches_closed_form(domain3):
    L = domain3.params.r_max - 1.0
    st = sample_radial(domain3, lambda r: np.sin(np.pi * (r - 1.0) / L))
    expected = np.sin(np.pi * (domain3.nodes - 1.0) / L)
    assert np.allclose(st.values[0], expected, rtol=0, atol=0)


def test_sample_radial_rejects_nonfinite(domain3):
    with pytest.raises(ValueError):
        sample_radial(domain3, lambda r: np.full_like(r, np.nan))


def test_field_state_shape_check(domain3):
    with pytest.raises(ValueError):
        FieldState(domain3, 0.0, np.zeros(domain3.num_radial - 1, dtype=complex))


def test_outer_shell_mask(domain3):
    mask = domain3.outer_shell_mask(0.1)
    assert mask[-1] and not mask[0]
    assert np.all(domain3.nodes[mask] >= 0.9 * domain3.params.r_max)


def test_mode_point_roundtrip_and_parseval(domain2):
    rng = np.random.default_rng(7)
    vals = (rng.standard_normal((16, domain2.num_radial))
            + 1j * rng.standard_normal((16, domain2.num_radial)))
    st = FieldState(domain2, 0.0, vals, Representation.ANGULAR_POINTS)
    back = st.to_modes().to_points()
    assert np.allclose(back.values, st.values, atol=1e-13)
    # mass must agree between representations (Parseval)
    assert mass(st) == pytest.approx(mass(st.to_modes()), rel=1e-12)


def test_radial_state_in_angular_domain_is_mode_zero(domain2):
    st = sample_radial(domain2, lambda r: np.exp(-((r - 2.0) ** 2)))
    assert st.representation is Representation.ANGULAR_MODES
    assert np.all(st.values[1:] == 0)
    pts = st.to_points()
    # mode 0 only: identical profile at every angle
    assert np.allclose(pts.values, pts.values[0][None, :], atol=1e-14)
