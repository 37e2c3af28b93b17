import numpy as np
import pytest
from hypothesis import given, strategies as st

from hkcone import BaseGeodesic, Cone, ConePoint, GeometryError, InputError
from hkcone.cone import (cone_distance, lift_geodesic, project_geodesic, radius_sq,
                         rescale_geodesic, scaling_identity_residual, spherical_from_cone)

radius = st.floats(0.0, 10.0)
angle = st.floats(0.0, 2 * np.pi)


def plane_geodesic(phi):
    """Base geodesic of length phi on the unit circle."""
    return BaseGeodesic("circle", np.array(0.0), np.array(phi))


def test_cone_distance_examples():
    assert cone_distance(3.0, 0.0, 1.2) == pytest.approx(3.0)
    assert cone_distance(1.0, 1.0, np.pi / 2) == pytest.approx(np.sqrt(2))
    assert cone_distance(2.0, 1.0, np.pi / 3) == pytest.approx(np.sqrt(3))


def test_cone_distance_cutoffs():
    # beyond the cutoff the cosine term is frozen
    assert cone_distance(1.0, 1.0, 2.0, cutoff=np.pi / 2) == pytest.approx(np.sqrt(2))
    assert cone_distance(1.0, 1.0, 4.0) == pytest.approx(2.0)
    with pytest.raises(InputError):
        cone_distance(1.0, 1.0, 1.0, cutoff=1.0)


def test_spherical_from_cone_examples():
    assert spherical_from_cone(0.0) == 0.0
    assert spherical_from_cone(np.sqrt(2)) == pytest.approx(np.pi / 2)
    assert spherical_from_cone(2.0) == pytest.approx(np.pi)
    with pytest.raises(GeometryError):
        spherical_from_cone(2.1)


@given(angle)
def test_spherical_recovers_truncated_base_distance(phi):
    D = cone_distance(1.0, 1.0, phi)
    assert spherical_from_cone(D) == pytest.approx(min(phi, np.pi), abs=1e-7)


def test_scaling_identity_examples():
    assert scaling_identity_residual(1.0, 1.0, np.pi / 2, 1.0, 1.0) == pytest.approx(0, abs=1e-14)
    assert scaling_identity_residual(1.0, 1.0, np.pi / 2, 2.0, 1.0) == pytest.approx(0, abs=1e-14)
    assert scaling_identity_residual(1.3, 0.4, 1.0, 2.0, 0.0) == pytest.approx(0, abs=1e-14)


@given(radius, radius, angle, radius, radius)
def test_scaling_identity_property(r0, r1, phi, a0, a1):
    scale = max(1.0, r0 * a0, r1 * a1) ** 2
    assert abs(scaling_identity_residual(r0, r1, phi, a0, a1)) <= 1e-10 * scale


def test_apex_points_compare_equal():
    c = Cone("sphere")
    a = ConePoint(np.array([1.0, 0, 0]), 0.0)
    b = ConePoint(np.array([0, 1.0, 0]), 0.0)
    assert c.equal(a, b)
    assert c.distance(a, ConePoint(np.array([0, 0, 1.0]), 2.0)) == 2.0


def test_lift_symmetric_example():
    g = lift_geodesic(plane_geodesic(np.pi / 2), 1.0, 1.0)
    assert g.radius(0.5) ** 2 == pytest.approx(0.5)
    assert g.zeta(0.5) == pytest.approx(0.5)
    assert g.radius(0.0) == pytest.approx(1.0) and g.zeta(0.0) == 0.0
    assert g.zeta(1.0) == pytest.approx(1.0)


def test_lift_radius_formulas_agree():
    g = lift_geodesic(plane_geodesic(np.pi / 2), 1.0, 2.0)
    rho2 = g.radius(0.5) ** 2
    assert rho2 == pytest.approx(5 / 4)
    # (1-t) r0^2 + t r1^2 - t (1-t) d_C^2
    assert rho2 == pytest.approx(0.5 + 2 - 0.25 * 5)


@given(st.floats(0.05, 3.0), st.floats(0.1, 5), st.floats(0.1, 5))
def test_lifted_geodesic_invariants(phi, r0, r1):
    g = lift_geodesic(plane_geodesic(phi), r0, r1)
    c = g.cone
    ts = np.linspace(0, 1, 11)
    dc2 = g.length ** 2
    for t in ts:
        rho2 = g.radius(t) ** 2
        assert rho2 == pytest.approx((1 - t) * r0 ** 2 + t * r1 ** 2 - t * (1 - t) * dc2, abs=1e-10 * (1 + dc2))
        assert rho2 <= (1 - t) * r0 ** 2 + t * r1 ** 2 + 1e-12
        if phi <= np.pi / 2:
            assert rho2 >= (1 - t) ** 2 * r0 ** 2 + t ** 2 * r1 ** 2 - 1e-12
    for s, t in [(0.0, 1.0), (0.1, 0.4), (0.3, 0.9)]:
        assert c.distance(g(s), g(t)) == pytest.approx(abs(t - s) * g.length, abs=1e-9)


def test_degenerate_geodesic_runs_through_apex():
    g = lift_geodesic(BaseGeodesic("euclidean", np.array([0.0]), np.array([4.0])), 1.0, 2.0, scale=1.0)
    assert g.degenerate
    assert g.length == pytest.approx(3.0)
    assert g.radius(1 / 3) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(GeometryError):
        project_geodesic(g)


def test_projection_examples():
    p = project_geodesic(lift_geodesic(plane_geodesic(np.pi / 2), 1.0, 1.0))
    assert p.sigma(0.5) == pytest.approx(0.5)
    assert p.sigma(0.0) == 0.0 and p.sigma(1.0) == pytest.approx(1.0)
    assert p.radius(0.5) == pytest.approx(1 / np.sqrt(2))


@given(st.floats(0.05, 3.0), st.floats(0.1, 5), st.floats(0.1, 5))
def test_project_lift_inverse(phi, r0, r1):
    g = lift_geodesic(plane_geodesic(phi), r0, r1)
    p = project_geodesic(g)
    ts = np.linspace(0, 1, 21)
    np.testing.assert_allclose(g.zeta(p.sigma(ts)), ts, atol=1e-10)
    np.testing.assert_allclose(g.radius(p.sigma(ts)), p.radius(ts), rtol=1e-10)


def test_second_difference_of_squared_radius_is_constant():
    g = lift_geodesic(plane_geodesic(1.1), 0.7, 1.9)
    ts = np.linspace(0, 1, 101)
    h = ts[1] - ts[0]
    d2 = np.diff(radius_sq(ts, g.r0, g.r1, g.phi), 2) / h ** 2
    np.testing.assert_allclose(d2, 2 * g.length ** 2, rtol=1e-8)


def test_rescale_identity_and_constant_factor():
    g = lift_geodesic(plane_geodesic(np.pi / 2), 1.0, 1.0)
    same = rescale_geodesic(g, 1.0, 1.0)
    for t in np.linspace(0, 1, 5):
        assert same.radius(t) == pytest.approx(g.radius(t))
    doubled = rescale_geodesic(g, 3.0, 3.0)
    np.testing.assert_allclose(doubled.B(np.linspace(0, 1, 5)), np.linspace(0, 1, 5))
    assert doubled.radius(0.3) == pytest.approx(3 * g.radius(0.3))


def test_rescaled_geodesic_constant_speed():
    g = lift_geodesic(plane_geodesic(np.pi / 2), 1.0, 1.0)
    r = rescale_geodesic(g, 2.0, 1.0)
    c = g.cone
    L = c.distance(r(0.0), r(1.0))
    assert L ** 2 == pytest.approx(5.0)
    for s, t in [(0.0, 0.5), (0.2, 0.7), (0.5, 1.0)]:
        assert c.distance(r(s), r(t)) == pytest.approx(abs(t - s) * L, abs=1e-9)


def test_rescale_rejects_bad_factors():
    g = lift_geodesic(plane_geodesic(1.0), 1.0, 1.0)
    with pytest.raises(InputError):
        rescale_geodesic(g, 0.0, 0.0)
    with pytest.raises(InputError):
        rescale_geodesic(g, -1.0, 1.0)
