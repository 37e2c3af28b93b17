import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hkcone import BaseGeodesic, GeometryError, InputError
from hkcone.cone import Cone, ConePoint, lift_geodesic
from hkcone.semiconcavity import (M_constant, cone_transfer_A, cone_transfer_B, estimate_K,
                                  radius_lower_bound, semiconcavity_K, sine_series_constant,
                                  transfer_f1_to_f2, transfer_f2_to_f1)

C_PINNED = 1.6040917231237404


def test_sine_series_constant_pinned():
    assert sine_series_constant() == pytest.approx(C_PINNED, rel=1e-15)
    assert sine_series_constant(tol=0.66) == pytest.approx(4 / 6 + 8 * np.pi ** 2 / 120)
    assert sine_series_constant(tol=10.0) == pytest.approx(4 / 6)


def test_sine_interpolation_bound_on_grid():
    C = sine_series_constant()
    t = np.linspace(0, 1, 100)[:, None]
    x = np.linspace(0, np.pi, 100)[None, :]
    lhs = np.abs(np.sin(x * t) - t * np.sin(x))
    assert np.all(lhs <= C * t * (1 - t) * x ** 3 + 1e-15)


def test_M_constant():
    assert M_constant(0.0) == 1.0
    assert M_constant(np.pi / 4) == pytest.approx(np.pi / 2)
    y = np.linspace(1e-9, 2 * 0.7, 2001)
    assert M_constant(0.7) == pytest.approx(np.max(y / np.sin(y)))
    with pytest.raises(InputError):
        M_constant(np.pi / 2)


def test_transfer_arithmetic():
    assert transfer_f1_to_f2(1.0, np.pi / 4, 1.0) == pytest.approx(1 + 4 / np.pi)
    assert transfer_f2_to_f1(1.0, 1.0) == pytest.approx(2.0)
    assert transfer_f1_to_f2(1.0, np.pi / 4, 3.0) == pytest.approx(9 * (1 + 4 / np.pi))
    assert transfer_f2_to_f1(1.0, 0.5) == pytest.approx(0.5)
    with pytest.raises(InputError):
        transfer_f1_to_f2(1.0, np.pi / 2, 1.0)
    with pytest.raises(InputError):
        transfer_f2_to_f1(0.0, 1.0)


def test_cone_transfer_examples():
    M = np.pi / 2
    C = C_PINNED
    expect = (4 * C * M ** 3 + M ** 2) / (4 / np.sqrt(2)) + 1
    assert cone_transfer_A(0.0, 1, 1, 1, np.pi / 4) == pytest.approx(expect)
    # small balls: M -> 1
    r_min = 0.5
    assert cone_transfer_A(2.0, 1, 1, 3, 1e-8, r_min=r_min) == pytest.approx(3 * (4 * C + 3) / (4 * r_min) + 1, rel=1e-9)
    with pytest.raises(InputError):
        cone_transfer_B(1.0, 1.0, 1.0, np.pi / 4, r1=2.0)
    B = cone_transfer_B(1.0, 1.0, 1.0, np.pi / 4, r1=1.0)
    assert B == pytest.approx(2 * C * M)


def test_radius_lower_bound_matches_grid():
    for r0, r1, phi in [(1, 1, np.pi / 2), (1, 3, 1.0), (2, 0.5, 2.5), (1, 1, np.pi)]:
        g = lift_geodesic(BaseGeodesic("euclidean", np.zeros(1), np.array([phi])), r0, r1, scale=1.0)
        grid = min(g.radius(t) for t in np.linspace(0, 1, 20001))
        assert radius_lower_bound(r0, r1, phi) == pytest.approx(grid, abs=1e-6)
    assert radius_lower_bound(1, 1, np.pi / 2) == pytest.approx(1 / np.sqrt(2))


def test_semiconcavity_K_on_exact_parabola():
    ts = np.linspace(0, 1, 9)
    K, worst = semiconcavity_K(ts, 3 * ts ** 2 + ts, np.subtract.outer(ts, ts) ** 2)
    assert K == pytest.approx(3.0)
    assert len(worst) == 3
    with pytest.raises(GeometryError):
        semiconcavity_K(ts, ts, np.zeros((9, 9)))


def test_flat_plane_normalized_K_vanishes():
    rng = np.random.default_rng(0)
    for _ in range(5):
        x0, x1, x2 = rng.normal(size=(3, 2))
        g = BaseGeodesic("euclidean", x0, x1)
        rep = estimate_K("euclidean", g, x2)
        assert abs(rep.K_normalized) <= 1e-9
        # closed-form oracle: f is a quadratic with f'' = 2 |x1 - x0|^2
        ts = np.linspace(0, 1, 5)
        f = [np.sum((x2 - (1 - t) * x0 - t * x1) ** 2) for t in ts]
        np.testing.assert_allclose(np.diff(f, 2) / 0.25 ** 2, 2 * np.sum((x1 - x0) ** 2), rtol=1e-9)


def test_observer_at_start_is_parabola():
    g = BaseGeodesic("euclidean", np.array([0.0, 0.0]), np.array([2.0, 1.0]))
    rep = estimate_K("euclidean", g, np.array([0.0, 0.0]))
    assert abs(rep.K_normalized) <= 1e-9
    assert rep.d01 == pytest.approx(np.sqrt(5))


def sphere_triple(rng, D):
    c = rng.normal(size=3)
    c /= np.linalg.norm(c)

    def near():
        v = rng.normal(size=3)
        v -= v @ c * c
        v /= np.linalg.norm(v)
        a = rng.uniform(0, D)
        return np.cos(a) * c + np.sin(a) * v

    return near(), near(), near()


def test_sphere_K_finite_and_grid_stable():
    rng = np.random.default_rng(1)
    x0, x1, x2 = sphere_triple(rng, np.pi / 4)
    g = BaseGeodesic("sphere", x0, x1)
    coarse = estimate_K("sphere", g, x2, n=33)
    fine = estimate_K("sphere", g, x2, n=65)
    assert np.isfinite(coarse.K)
    assert abs(fine.K - coarse.K) <= 0.05 * abs(fine.K)
    # positive curvature: d^2 is at least as concave as in flat space
    assert coarse.K_normalized <= 1e-9


@settings(max_examples=15)
@given(st.integers(0, 10_000), st.integers(0, 14), st.integers(18, 32))
def test_restriction_never_increases_K(seed, i, j):
    # nested grids: the sub-arc grid consists of points of the full grid
    rng = np.random.default_rng(seed)
    x0, x1, x2 = sphere_triple(rng, np.pi / 4)
    g = BaseGeodesic("sphere", x0, x1)
    full = estimate_K("sphere", g, x2, n=33)
    part = estimate_K("sphere", g, x2, n=j - i + 1, interval=(i / 32, j / 32))
    assert part.K <= full.K + 1e-9


def test_estimate_K_errors():
    p = np.array([1.0, 0.0])
    with pytest.raises(GeometryError):
        estimate_K("euclidean", BaseGeodesic("euclidean", p, p), np.zeros(2))
    with pytest.raises(InputError):
        estimate_K("euclidean", BaseGeodesic("euclidean", p, -p), np.zeros(2), variant="f3")


@pytest.mark.parametrize("seed", range(4))
def test_cone_transfer_bounds_on_sphere(seed):
    rng = np.random.default_rng(seed)
    D = np.pi / 4
    x0, x1, x2 = sphere_triple(rng, D)
    r0, r1, r2 = rng.uniform(0.5, 2, 3)
    base = BaseGeodesic("sphere", x0, x1)
    cone = Cone("sphere")
    ts = np.linspace(0, 1, 33)

    Kb = estimate_K("sphere", base, x2).K
    g = lift_geodesic(base, r0, r1)
    Kc = estimate_K(cone, g, ConePoint(x2, r2)).K
    rmin = min(g.radius(t) for t in ts)
    assert Kc <= cone_transfer_A(max(Kb, 1e-12), r0, r1, r2, D, r_min=rmin)

    gB = lift_geodesic(base, r0, r0)
    KcB = estimate_K(cone, gB, ConePoint(x2, r2)).K
    K1 = estimate_K("sphere", base, x2, variant="f1").K
    assert K1 <= cone_transfer_B(KcB, r0, r2, D, r_min=min(gB.radius(t) for t in ts))
