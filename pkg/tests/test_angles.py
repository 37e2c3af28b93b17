import numpy as np
import pytest
from hypothesis import given, strategies as st

from hkcone import BaseGeodesic, GeometryError, InputError
from hkcone.angles import (RefinementSchedule, base_angle_from_cone, comparison_cos,
                           cone_angle_from_base, kappa_independence_gap, local_angles,
                           mlac_check, mlac_from_angles)
from hkcone.cone import Cone, lift_geodesic


def ray(direction, length=1.0):
    d = np.asarray(direction, float)
    return BaseGeodesic("euclidean", np.zeros_like(d), length * d / np.linalg.norm(d))


def sphere_point(colat, lon):
    return np.array([np.sin(colat) * np.cos(lon), np.sin(colat) * np.sin(lon), np.cos(colat)])


def meridian(lon, colat=np.pi / 2):
    return BaseGeodesic("sphere", sphere_point(0.0, 0.0), sphere_point(colat, lon))


def test_comparison_cos_examples():
    assert comparison_cos(0, 1, 1, 1) == pytest.approx(0.5)
    assert comparison_cos(1, np.pi / 2, np.pi / 2, np.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert comparison_cos(0, 1.0, 2.0, 3.0) == pytest.approx(-1.0)
    assert comparison_cos(-1, 1.0, 1.0, 0.0) == pytest.approx(1.0)


def test_comparison_cos_errors():
    with pytest.raises(GeometryError):
        comparison_cos(0, 0.0, 1.0, 1.0)
    with pytest.raises(GeometryError):
        comparison_cos(0, 1.0, 1.0, 3.0)
    with pytest.raises(GeometryError):
        comparison_cos(1, np.pi, 1.0, np.pi - 1.0)


@given(st.floats(0.01, 5), st.floats(0.01, 5), st.floats(0, 1))
def test_flat_comparison_matches_law_of_cosines(a, b, frac):
    c = abs(a - b) + frac * (a + b - abs(a - b))
    expect = (a * a + b * b - c * c) / (2 * a * b)
    assert comparison_cos(0, a, b, c) == pytest.approx(expect, abs=1e-9)


def test_kappa_gap_examples():
    rep = kappa_independence_gap("euclidean", ray([1, 0]), ray([1, 1]), 1.0, [1e-3])
    assert rep.max_gap <= 1e-5
    same = kappa_independence_gap("euclidean", ray([1, 0]), ray([1, 0]), 1.0, [1e-3, 1e-2])
    assert same.max_gap == 0.0


def test_kappa_gap_shrinks_on_sphere():
    g1, g2 = meridian(0.0), meridian(np.pi / 3)
    gaps = [kappa_independence_gap("sphere", g1, g2, 1.0, [(s, s)]).max_gap for s in (1e-1, 1e-2, 1e-3)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-5


def test_kappa_gap_rejects_bad_grid():
    with pytest.raises(InputError):
        kappa_independence_gap("euclidean", ray([1, 0]), ray([0, 1]), 1.0, [0.0])


def test_local_angles_flat_and_identical():
    rep = local_angles("euclidean", ray([1, 0]), ray([0, 1]))
    assert rep.upper == pytest.approx(np.pi / 2, abs=1e-6)
    assert rep.lower == pytest.approx(np.pi / 2, abs=1e-6)
    assert 0 <= rep.lower <= rep.upper <= np.pi
    zero = local_angles("euclidean", ray([1, 2]), ray([1, 2]))
    assert zero.upper == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("theta", [0.3, np.pi / 3, 2.0])
def test_local_angles_sphere_meridians(theta):
    rep = local_angles("sphere", meridian(0.0), meridian(theta))
    assert rep.upper == pytest.approx(theta, abs=1e-4)
    assert rep.extrapolated == pytest.approx(theta, abs=1e-4)


def test_local_angles_vertex_mismatch():
    other = BaseGeodesic("euclidean", np.array([1.0, 0.0]), np.array([2.0, 0.0]))
    with pytest.raises(GeometryError):
        local_angles("euclidean", ray([1, 0]), other)


def test_mlac_examples():
    rays = [ray([np.cos(a), np.sin(a)]) for a in (0.0, 2 * np.pi / 3, 4 * np.pi / 3)]
    res = mlac_check("euclidean", rays, tol=1e-6)
    assert res.satisfied and res.method == "angle-sum"
    assert mlac_check("euclidean", rays[:1]).satisfied
    assert mlac_check("euclidean", rays[:2]).satisfied
    ortho = [ray(np.eye(3)[i]) for i in range(3)]
    assert mlac_check("euclidean", ortho, tol=1e-6).satisfied
    with pytest.raises(InputError):
        mlac_check("euclidean", [])


def test_mlac_violation_certificate():
    # four directions pairwise at angle 2pi/3 cannot exist; the form is not copositive
    A = np.full((4, 4), 2 * np.pi / 3)
    np.fill_diagonal(A, 0.0)
    res = mlac_from_angles(A)
    assert not res.satisfied
    b = res.certificate
    assert np.all(b >= 0) and b.sum() == pytest.approx(1.0)
    assert b @ np.cos(A) @ b < -1e-10
    # three directions with angle sum above 2pi fail too
    assert not mlac_from_angles(np.array([[0, 2.2, 2.2], [2.2, 0, 2.2], [2.2, 2.2, 0]])).satisfied


def test_mlac_reparametrization_invariant():
    rays = [ray([np.cos(a), np.sin(a)], length=L) for a, L in [(0.0, 1.0), (1.9, 2.0), (4.0, 0.5), (5.0, 3.0)]]
    r1 = mlac_check("euclidean", rays)
    r2 = mlac_check("euclidean", [ray([np.cos(a), np.sin(a)], 1.0) for a in (0.0, 1.9, 4.0, 5.0)])
    assert r1.satisfied == r2.satisfied
    np.testing.assert_allclose(r1.angles, r2.angles, atol=1e-6)


def test_mlac_at_apex_of_narrow_cone():
    # angles at the apex equal truncated base distances; diameter <= pi/2 gives cos >= 0
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, np.pi / 2, 6)
    A = np.minimum(np.abs(pts[:, None] - pts[None, :]), np.pi)
    assert mlac_from_angles(A).satisfied


def test_cone_angle_examples():
    assert cone_angle_from_base(1, 1, 1, np.pi / 2, np.pi / 2, 0.0) == pytest.approx(0.5)
    assert cone_angle_from_base(1, 2, 2, 0.7, 0.7, 1.0) == pytest.approx(1.0)
    r0, r1, r2, phi02 = 2.0, 0.5, 1.0, 0.8
    d02 = np.sqrt(r0 ** 2 + r2 ** 2 - 2 * r0 * r2 * np.cos(phi02))
    expect = (r0 - r1) * (r0 - r2 * np.cos(phi02)) / (abs(r0 - r1) * d02)
    assert cone_angle_from_base(r0, r1, r2, 0.0, phi02, 0.3) == pytest.approx(expect)
    with pytest.raises(GeometryError):
        cone_angle_from_base(1, 1, 1, 0.0, 1.0, 0.0)


@given(st.floats(0.2, 3), st.floats(0.2, 3), st.floats(0.2, 3),
       st.floats(0.05, 3.0), st.floats(0.05, 3.0), st.floats(-1, 1))
def test_cone_base_angle_round_trip(r0, r1, r2, p1, p2, c):
    cc = cone_angle_from_base(r0, r1, r2, p1, p2, c)
    assert base_angle_from_cone(r0, r1, r2, p1, p2, cc) == pytest.approx(c, abs=1e-8)


def test_cone_angles_match_base_angles_on_sphere():
    theta = 1.1
    colat = 1.0
    r0, r1, r2 = 1.0, 1.5, 0.8
    b1, b2 = meridian(0.0, colat), meridian(theta, colat)
    c1, c2 = lift_geodesic(b1, r0, r1), lift_geodesic(b2, r0, r2)
    sched = RefinementSchedule(1e-3, 4)
    base = local_angles("sphere", b1, b2, sched)
    cone = local_angles(Cone("sphere"), c1, c2, sched)
    predicted = cone_angle_from_base(r0, r1, r2, colat, colat, np.cos(base.upper))
    assert abs(cone.upper - np.arccos(predicted)) <= 2e-3
