"""Finite geodesic base spaces.

Four kinds of base space are supported:

``euclidean``
    point cloud in R^k, coordinates shape (n, k).
``circle``
    points on the circle of circumference 2*pi, coordinates are angles, shape (n,).
``sphere``
    points on the unit sphere S^2, coordinates are unit vectors, shape (n, 3).
``graph``
    vertices of a weighted graph with shortest-path distance; coordinates are
    vertex indices. Graphs expose distances only, no interpolation.

Distances are kept as a dense matrix; the spaces are meant to be small.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import floyd_warshall

from .errors import GeometryError, InputError

KINDS = ("euclidean", "circle", "sphere", "graph")
INTERPOLABLE = ("euclidean", "circle", "sphere")

TWO_PI = 2.0 * np.pi
METRIC_TOL = 1e-12


def _as_coords(kind, points):
    if kind == "graph":
        return np.asarray(points, dtype=int).reshape(-1)
    pts = np.asarray(points, dtype=float)
    if kind == "circle":
        return np.mod(pts.reshape(-1), TWO_PI)
    if kind == "sphere":
        pts = np.atleast_2d(pts)
        if pts.shape[-1] != 3:
            raise InputError("sphere points must be 3-vectors")
        norms = np.linalg.norm(pts, axis=-1, keepdims=True)
        if np.any(norms == 0):
            raise InputError("sphere points must be nonzero vectors")
        return pts / norms
    if kind == "euclidean":
        if pts.ndim == 1:
            pts = pts[:, None]
        return pts
    raise InputError(f"unknown space kind {kind!r}")


def pairwise_distance(kind, a, b):
    """Distance matrix between two coordinate arrays of an analytic kind."""
    if kind == "euclidean":
        a = np.atleast_2d(a)
        b = np.atleast_2d(b)
        diff = a[:, None, :] - b[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=-1))
    if kind == "circle":
        a = np.atleast_1d(a)
        b = np.atleast_1d(b)
        d = np.mod(np.abs(a[:, None] - b[None, :]), TWO_PI)
        return np.minimum(d, TWO_PI - d)
    if kind == "sphere":
        a = np.atleast_2d(a)
        b = np.atleast_2d(b)
        cross = np.cross(a[:, None, :], b[None, :, :])
        dot = np.einsum("ik,jk->ij", a, b)
        return np.arctan2(np.linalg.norm(cross, axis=-1), dot)
    raise GeometryError(f"no analytic distance for kind {kind!r}")


def point_distance(kind, a, b):
    """Distance between two single coordinates of an analytic kind."""
    if kind == "euclidean":
        return float(np.linalg.norm(np.asarray(a, float) - np.asarray(b, float)))
    if kind == "circle":
        d = abs(float(a) - float(b)) % TWO_PI
        return min(d, TWO_PI - d)
    if kind == "sphere":
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        return float(np.arctan2(np.linalg.norm(np.cross(a, b)), np.dot(a, b)))
    raise GeometryError(f"no analytic distance for kind {kind!r}")


def geodesic_point(kind, a, b, t):
    """Point at fraction ``t`` of the constant-speed geodesic from ``a`` to ``b``.

    ``t`` may be a scalar or an array; the result stacks along the first axis
    for array input.
    """
    t_arr = np.asarray(t, dtype=float)
    if kind == "euclidean":
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        return a + np.multiply.outer(t_arr, b - a)
    if kind == "circle":
        delta = (float(b) - float(a) + np.pi) % TWO_PI - np.pi
        if abs(abs(delta) - np.pi) <= METRIC_TOL:
            raise GeometryError("antipodal circle points: geodesic is not unique")
        return np.mod(float(a) + t_arr * delta, TWO_PI)
    if kind == "sphere":
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        omega = point_distance("sphere", a, b)
        if omega >= np.pi - 1e-9:
            raise GeometryError("antipodal sphere points: geodesic is not unique")
        if omega == 0.0:
            return a + np.multiply.outer(np.zeros_like(t_arr), a)
        # orthonormal frame in the great circle through a and b
        u = b - np.dot(a, b) * a
        u /= np.linalg.norm(u)
        ang = t_arr * omega
        return np.multiply.outer(np.cos(ang), a) + np.multiply.outer(np.sin(ang), u)
    if kind == "graph":
        raise GeometryError("graph spaces do not support geodesic interpolation")
    raise InputError(f"unknown space kind {kind!r}")


@dataclass(frozen=True)
class BaseGeodesic:
    """Constant-speed geodesic t -> point on [0, 1] between two coordinates."""

    kind: str
    start: np.ndarray
    end: np.ndarray
    speed: float = field(init=False)

    def __post_init__(self):
        if self.kind not in INTERPOLABLE:
            raise GeometryError(f"kind {self.kind!r} does not support interpolation")
        # fail early on antipodal endpoints
        geodesic_point(self.kind, self.start, self.end, 0.5)
        object.__setattr__(self, "speed", point_distance(self.kind, self.start, self.end))

    def __call__(self, t):
        if np.any(np.asarray(t) < -1e-12) or np.any(np.asarray(t) > 1 + 1e-12):
            raise InputError("geodesic parameter must lie in [0, 1]")
        return geodesic_point(self.kind, self.start, self.end, t)

    @property
    def length(self):
        return self.speed


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """A finite metric space with a dense distance matrix.

    Instances are immutable; use the ``euclidean``/``circle``/``sphere``/
    ``graph`` constructors rather than calling the class directly.
    """

    kind: str
    points: np.ndarray
    dist: np.ndarray
    edges: tuple = ()

    def __len__(self):
        return self.dist.shape[0]

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_coords(cls, kind, points, validate=True):
        coords = _as_coords(kind, points)
        if kind == "graph":
            raise InputError("graph spaces need edges; use MetricSpace.graph")
        dist = pairwise_distance(kind, coords, coords)
        np.fill_diagonal(dist, 0.0)
        dist = 0.5 * (dist + dist.T)
        space = cls(kind, coords, dist)
        if validate:
            space.validate()
        return space

    @classmethod
    def euclidean(cls, points, validate=True):
        return cls.from_coords("euclidean", points, validate)

    @classmethod
    def circle(cls, angles, validate=True):
        return cls.from_coords("circle", angles, validate)

    @classmethod
    def sphere(cls, vectors, validate=True):
        return cls.from_coords("sphere", vectors, validate)

    @classmethod
    def graph(cls, n, edges, validate=True):
        """Shortest-path metric on ``n`` vertices from ``(i, j, weight)`` edges."""
        n = int(n)
        rows, cols, vals = [], [], []
        for e in edges:
            i, j = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if not (0 <= i < n and 0 <= j < n):
                raise InputError(f"edge ({i}, {j}) references an unknown vertex")
            if w <= 0:
                raise InputError("edge weights must be positive")
            rows += [i, j]
            cols += [j, i]
            vals += [w, w]
        adj = csr_matrix((vals, (rows, cols)), shape=(n, n))
        dist = floyd_warshall(adj, directed=False)
        if not np.all(np.isfinite(dist)):
            raise InputError("graph is disconnected")
        edge_tuple = tuple((int(e[0]), int(e[1]), float(e[2]) if len(e) > 2 else 1.0) for e in edges)
        space = cls("graph", np.arange(n), dist, edge_tuple)
        if validate:
            space.validate()
        return space

    @classmethod
    def from_matrix(cls, dist, validate=True):
        """Abstract finite space given only by its distance matrix (kind ``graph``)."""
        dist = np.asarray(dist, dtype=float)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise InputError("distance matrix must be square")
        space = cls("graph", np.arange(dist.shape[0]), dist)
        if validate:
            space.validate()
        return space

    @classmethod
    def from_json(cls, desc, validate=True):
        kind = desc.get("kind")
        if kind not in KINDS:
            raise InputError(f"unknown space kind {kind!r}")
        if "dist" in desc:
            return cls.from_matrix(desc["dist"], validate=validate)
        if kind == "graph":
            n = desc.get("n", len(desc.get("points", [])))
            return cls.graph(n, desc.get("edges", []), validate=validate)
        return cls.from_coords(kind, desc["points"], validate=validate)

    def to_json(self):
        out = {"kind": self.kind, "points": np.asarray(self.points).tolist()}
        if self.kind == "graph":
            out["edges"] = [list(e) for e in self.edges]
            if not self.edges:
                out["dist"] = self.dist.tolist()
        return out

    # -- queries ------------------------------------------------------------
    def _check(self, i):
        if not (0 <= int(i) < len(self)):
            raise InputError(f"unknown point index {i}")
        return int(i)

    def distance(self, i, j):
        return float(self.dist[self._check(i), self._check(j)])

    def interpolate(self, i, j, t):
        """Point at fraction t of the geodesic from point i to point j."""
        i, j = self._check(i), self._check(j)
        if not 0.0 <= t <= 1.0:
            raise InputError("t must lie in [0, 1]")
        return geodesic_point(self.kind, self.points[i], self.points[j], t)

    def geodesic(self, i, j):
        i, j = self._check(i), self._check(j)
        return BaseGeodesic(self.kind, self.points[i], self.points[j])

    def ball(self, i, radius):
        """Indices of the closed ball of ``radius`` around point i."""
        return np.flatnonzero(self.dist[self._check(i)] <= radius + METRIC_TOL)

    def distances_to(self, coords):
        """Distance matrix from every space point to arbitrary coordinates."""
        if self.kind == "graph":
            return self.dist[:, np.asarray(coords, dtype=int)]
        return pairwise_distance(self.kind, self.points, _as_coords(self.kind, coords))

    @property
    def supports_interpolation(self):
        return self.kind in INTERPOLABLE

    @property
    def diameter(self):
        return float(self.dist.max()) if len(self) else 0.0

    def validate(self, tol=METRIC_TOL):
        report = metric_violations(self.dist, tol)
        if not report["ok"]:
            raise InputError(f"distance matrix is not a metric: {report}")


def metric_violations(dist, tol=METRIC_TOL):
    """Worst violations of the metric axioms for a distance matrix.

    Returns a dict with the worst asymmetry, negative entry, diagonal entry,
    off-diagonal zero count and triangle-inequality excess.
    """
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    asym = float(np.max(np.abs(d - d.T))) if n else 0.0
    neg = float(max(0.0, -d.min())) if n else 0.0
    diag = float(np.max(np.abs(np.diag(d)))) if n else 0.0
    off = d + np.eye(n)
    zeros = int(np.sum(off[~np.eye(n, dtype=bool)] <= 0.0)) if n > 1 else 0
    tri = 0.0
    for k in range(n):
        excess = d - (d[:, k][:, None] + d[k, :][None, :])
        tri = max(tri, float(excess.max()))
    ok = asym <= tol and neg <= tol and diag <= tol and zeros == 0 and tri <= tol
    return {"ok": ok, "asymmetry": asym, "negative": neg, "diagonal": diag,
            "zero_offdiagonal": zeros, "triangle_excess": tri}
