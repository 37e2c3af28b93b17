import numpy as np
import pytest
from hypothesis import given, strategies as st

from hkcone import BaseGeodesic, GeometryError, InputError, MetricSpace
from hkcone.metric_base import metric_violations, point_distance

coord = st.floats(-5, 5, allow_nan=False)


def test_euclidean_distance_pythagorean():
    sp = MetricSpace.euclidean([[0, 0], [3, 4]])
    assert sp.distance(0, 1) == pytest.approx(5.0)
    assert sp.distance(1, 1) == 0.0


def test_sphere_pole_to_equator():
    sp = MetricSpace.sphere([[0, 0, 1], [1, 0, 0]])
    assert sp.distance(0, 1) == pytest.approx(np.pi / 2, abs=1e-12)


def test_circle_wraps_around():
    sp = MetricSpace.circle([0.1, 2 * np.pi - 0.1])
    assert sp.distance(0, 1) == pytest.approx(0.2, abs=1e-12)


def test_graph_shortest_paths():
    sp = MetricSpace.graph(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (0, 3, 5.0)])
    assert sp.distance(0, 3) == pytest.approx(4.0)
    assert sp.distance(3, 0) == sp.distance(0, 3)


def test_unknown_index():
    sp = MetricSpace.euclidean([[0.0], [1.0]])
    with pytest.raises(InputError):
        sp.distance(0, 7)


def test_disconnected_graph_rejected():
    with pytest.raises(InputError):
        MetricSpace.graph(3, [(0, 1, 1.0)])


def test_interpolate_midpoint_and_endpoints():
    sp = MetricSpace.euclidean([[0, 0], [2, 0]])
    np.testing.assert_allclose(sp.interpolate(0, 1, 0.5), [1, 0])
    np.testing.assert_allclose(sp.interpolate(0, 1, 0.0), [0, 0])
    np.testing.assert_allclose(sp.interpolate(0, 1, 1.0), [2, 0])


def test_circle_arc_midpoint():
    sp = MetricSpace.circle([0.0, np.pi / 2])
    mid = sp.interpolate(0, 1, 0.5)
    assert point_distance("circle", mid, 0.0) == pytest.approx(np.pi / 4, abs=1e-12)
    assert point_distance("circle", mid, np.pi / 2) == pytest.approx(np.pi / 4, abs=1e-12)


def test_antipodal_sphere_points_rejected():
    with pytest.raises(GeometryError):
        BaseGeodesic("sphere", np.array([0, 0, 1.0]), np.array([0, 0, -1.0]))


def test_graph_has_no_interpolation():
    sp = MetricSpace.graph(2, [(0, 1, 1.0)])
    with pytest.raises((GeometryError, InputError)):
        sp.interpolate(0, 1, 0.5)


def test_json_round_trip():
    sp = MetricSpace.sphere(np.eye(3))
    back = MetricSpace.from_json(sp.to_json())
    np.testing.assert_allclose(back.dist, sp.dist, atol=1e-15)
    g = MetricSpace.graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    np.testing.assert_array_equal(MetricSpace.from_json(g.to_json()).dist, g.dist)


def test_corrupted_matrix_detected():
    d = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], float)
    rep = metric_violations(d)
    assert not rep["ok"] and rep["triangle_excess"] == pytest.approx(3.0)
    with pytest.raises(InputError):
        MetricSpace.from_matrix(d)


@pytest.mark.parametrize("kind", ["euclidean", "circle", "sphere"])
def test_triangle_inequality_random_spaces(kind, rng):
    pts = {"euclidean": rng.normal(size=(30, 3)), "circle": rng.uniform(0, 2 * np.pi, 30),
           "sphere": rng.normal(size=(30, 3))}[kind]
    sp = MetricSpace.from_coords(kind, pts)
    assert metric_violations(sp.dist, 1e-12)["ok"]


@given(st.lists(coord, min_size=4, max_size=4), st.floats(0, 1), st.floats(0, 1))
def test_euclidean_constant_speed(xs, s, t):
    g = BaseGeodesic("euclidean", np.array(xs[:2]), np.array(xs[2:]))
    assert point_distance("euclidean", g(s), g(t)) == pytest.approx(abs(t - s) * g.length, abs=1e-9)


@given(st.lists(st.floats(-1, 1), min_size=6, max_size=6))
def test_sphere_constant_speed(v):
    a, b = np.array(v[:3]), np.array(v[3:])
    if np.linalg.norm(a) < 0.1 or np.linalg.norm(b) < 0.1:
        return
    a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
    if a @ b < -0.999:
        return
    g = BaseGeodesic("sphere", a, b)
    for s, t in [(0.0, 0.3), (0.2, 0.9), (0.5, 1.0)]:
        assert point_distance("sphere", g(s), g(t)) == pytest.approx(abs(t - s) * g.length, abs=1e-9)


def test_circle_constant_speed_grid(rng):
    for _ in range(20):
        a, b = rng.uniform(0, 2 * np.pi, 2)
        if abs(point_distance("circle", a, b) - np.pi) < 1e-6:
            continue
        g = BaseGeodesic("circle", np.array(a), np.array(b))
        ts = np.linspace(0, 1, 11)
        for s in ts:
            for t in ts:
                assert point_distance("circle", g(s), g(t)) == pytest.approx(abs(t - s) * g.length, abs=1e-9)
