"""Comparison angles, local angle estimates and local angle conditions.

Curves are anything callable on ``[0, 1]`` (base geodesics, cone geodesics);
distances come from a *metric*, which may be a base kind such as
``"sphere"``, a :class:`~hkcone.metric_base.MetricSpace`, a
:class:`~hkcone.cone.Cone` or any two-argument callable.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, InputError
from .metric_base import MetricSpace, point_distance

CLAMP_TOL = 1e-12


def as_metric(metric):
    """Normalise the accepted metric descriptions to a callable ``d(p, q)``."""
    if isinstance(metric, str):
        return lambda p, q: point_distance(metric, p, q)
    if isinstance(metric, MetricSpace):
        kind = metric.kind
        return lambda p, q: point_distance(kind, p, q)
    if hasattr(metric, "distance") and hasattr(metric, "geodesic"):
        return metric.distance
    if callable(metric):
        return metric
    raise InputError(f"cannot use {metric!r} as a metric")


def _clamp(c):
    if abs(c) > 1.0 + CLAMP_TOL:
        raise GeometryError(f"cosine {c!r} outside [-1, 1] beyond tolerance")
    return min(1.0, max(-1.0, c))


def comparison_cos(kappa, d01, d02, d12):
    """Cosine of the kappa-comparison angle at x0 of the triangle (x0, x1, x2).

    Evaluated as ``1 - 2 S(a+b-c) S(a-b+c) / (S'(b) S'(c))``-type expressions
    (``a`` the opposite side), which are algebraically equal to the usual
    law of cosines but do not lose precision on tiny triangles.
    """
    if d01 <= 0 or d02 <= 0:
        raise GeometryError("comparison angle needs two nondegenerate legs")
    slack = 1e-12 * max(d01, d02, d12)
    if d12 > d01 + d02 + slack or d01 > d02 + d12 + slack or d02 > d01 + d12 + slack:
        raise GeometryError("side lengths violate the triangle inequality")
    p = max(d12 + d01 - d02, 0.0)
    q = max(d12 - d01 + d02, 0.0)
    if kappa == 0:
        c = 1.0 - p * q / (2.0 * d01 * d02)
    elif kappa > 0:
        k = np.sqrt(kappa)
        if k * d01 >= np.pi or k * d02 >= np.pi:
            raise GeometryError("legs too long for the positive-curvature model space")
        c = 1.0 - 2.0 * np.sin(k * p / 2) * np.sin(k * q / 2) / (np.sin(k * d01) * np.sin(k * d02))
    else:
        k = np.sqrt(-kappa)
        c = 1.0 - 2.0 * np.sinh(k * p / 2) * np.sinh(k * q / 2) / (np.sinh(k * d01) * np.sinh(k * d02))
    return _clamp(float(c))


def _at_arclength(curve, length, s):
    return curve(min(1.0, s / length))


def _curve_length(dist, curve):
    return float(dist(curve(0.0), curve(1.0)))


def _check_vertex(dist, g1, g2):
    if dist(g1(0.0), g2(0.0)) > 1e-9:
        raise GeometryError("geodesics do not share their starting point")


def _samples(dist, g1, g2, pairs, kappa=0.0):
    L1, L2 = _curve_length(dist, g1), _curve_length(dist, g2)
    if L1 <= 0 or L2 <= 0:
        raise GeometryError("zero-length geodesic")
    x0 = g1(0.0)
    out = []
    for s, t in pairs:
        p1 = _at_arclength(g1, L1, s)
        p2 = _at_arclength(g2, L2, t)
        out.append(comparison_cos(kappa, dist(x0, p1), dist(x0, p2), dist(p1, p2)))
    return np.array(out)


@dataclass(frozen=True)
class GapReport:
    max_gap: float
    gaps: np.ndarray
    scales: np.ndarray
    rate_constant: float


def kappa_independence_gap(metric, g1, g2, kappa, grid):
    """Largest ``|a_0 - a_kappa|`` over arclength pairs ``(s, t)``.

    ``grid`` is an iterable of pairs or of scalars (meaning ``s = t``). The
    fitted ``rate_constant`` is ``max gap / (s + t)``.
    """
    dist = as_metric(metric)
    _check_vertex(dist, g1, g2)
    pairs = [(float(p), float(p)) if np.ndim(p) == 0 else (float(p[0]), float(p[1])) for p in grid]
    if not pairs or min(min(p) for p in pairs) <= 0:
        raise InputError("grid values must be positive")
    a0 = _samples(dist, g1, g2, pairs, 0.0)
    ak = _samples(dist, g1, g2, pairs, kappa)
    gaps = np.abs(a0 - ak)
    scales = np.array([s + t for s, t in pairs])
    return GapReport(float(gaps.max()), gaps, scales, float(np.max(gaps / scales)))


@dataclass(frozen=True)
class RefinementSchedule:
    """Arclength samples ``tau * 2**-k`` for ``k = 0 .. levels-1``."""

    tau: float = 1e-3
    levels: int = 6

    def __post_init__(self):
        if self.tau <= 0 or self.levels < 1:
            raise InputError("schedule needs tau > 0 and at least one level")

    @property
    def scales(self):
        return self.tau * 2.0 ** -np.arange(self.levels)


@dataclass(frozen=True)
class AngleReport:
    lower: float
    upper: float
    extrapolated: float
    schedule: RefinementSchedule
    pairs: np.ndarray
    samples: np.ndarray = field(repr=False)


def local_angles(metric, g1, g2, schedule=None):
    """Estimate upper and lower angles between two curves issuing from one point.

    All pairs ``(s, t)`` of schedule scales are sampled; the upper angle is
    ``arccos`` of the smallest sampled comparison cosine and the lower angle
    ``arccos`` of the largest. ``extrapolated`` applies one Richardson step
    to the diagonal samples ``s = t`` at the two finest scales.
    """
    schedule = schedule or RefinementSchedule()
    dist = as_metric(metric)
    _check_vertex(dist, g1, g2)
    h = schedule.scales
    pairs = np.array(list(itertools.product(h, h)))
    cos = _samples(dist, g1, g2, pairs)
    upper = float(np.arccos(cos.min()))
    lower = float(np.arccos(cos.max()))
    if len(h) >= 2:
        diag = _samples(dist, g1, g2, [(h[-2], h[-2]), (h[-1], h[-1])])
        ext = _clamp(min(1.0, 2.0 * diag[1] - diag[0]))
    else:
        ext = float(cos[0])
    return AngleReport(lower, upper, float(np.arccos(ext)), schedule, pairs, cos)


@dataclass(frozen=True)
class LacResult:
    satisfied: bool
    certificate: object
    min_form: float
    method: str
    angles: np.ndarray = field(repr=False)


def _simplex_grid(m, steps):
    # stars and bars: all compositions of ``steps`` into m parts
    for bars in itertools.combinations(range(steps + m - 1), m - 1):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(steps + m - 2 - prev)
        yield parts


def _project_simplex(v):
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.nonzero(u - css / np.arange(1, len(v) + 1) > 0)[0][-1]
    return np.maximum(v - css[k] / (k + 1.0), 0.0)


def copositivity_search(G, tol=1e-10, steps=64, max_points=200_000):
    """Minimise ``b^T G b`` over the probability simplex by grid search plus polish.

    Returns ``(min_value, argmin)``. The grid step is ``1/steps``, coarsened
    if the grid would exceed ``max_points`` vertices.
    """
    G = np.asarray(G, dtype=float)
    m = G.shape[0]
    from math import comb

    while steps > 2 and comb(steps + m - 1, m - 1) > max_points:
        steps //= 2
    B = np.array(list(_simplex_grid(m, steps)), dtype=float) / steps
    vals = np.einsum("ki,ij,kj->k", B, G, B)
    best = np.argsort(vals)[: min(8, len(vals))]
    best_val, best_b = float(vals[best[0]]), B[best[0]]
    lip = 2.0 * np.abs(np.linalg.eigvalsh(0.5 * (G + G.T))).max() + 1e-300
    for idx in best:
        b = B[idx].copy()
        for _ in range(500):
            nb = _project_simplex(b - (G + G.T) @ b / lip)
            if np.max(np.abs(nb - b)) < 1e-15:
                break
            b = nb
        v = float(b @ G @ b)
        if v < best_val:
            best_val, best_b = v, b
    return best_val, best_b


def mlac_from_angles(angles, tol=1e-10):
    """Decide m-LAC from a symmetric matrix of upper angles."""
    A = np.asarray(angles, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError("angle matrix must be square")
    m = A.shape[0]
    if m == 0:
        raise InputError("m-LAC needs at least one geodesic")
    G = np.cos(A)
    if m <= 2:
        return LacResult(True, "pass", float("nan"), "trivial", A)
    if m == 3:
        total = A[0, 1] + A[1, 2] + A[0, 2]
        ok = total <= 2 * np.pi + tol
        return LacResult(bool(ok), "pass" if ok else np.ones(3) / 3, float(2 * np.pi - total), "angle-sum", A)
    if np.all(G >= -tol):
        return LacResult(True, "pass", float(G.min()), "nonnegative", A)
    val, b = copositivity_search(G, tol)
    ok = val >= -tol
    return LacResult(bool(ok), "pass" if ok else b, val, "simplex-search", A)


def mlac_check(metric, geodesics, tol=1e-10, schedule=None):
    """Check m-LAC at the common vertex of ``geodesics`` using estimated upper angles."""
    m = len(geodesics)
    if m == 0:
        raise InputError("m-LAC needs at least one geodesic")
    A = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            A[i, j] = A[j, i] = local_angles(metric, geodesics[i], geodesics[j], schedule).upper
    return mlac_from_angles(A, tol)


def cone_angle_from_base(r0, r1, r2, phi01, phi02, cos_base):
    """Cosine of the cone angle at ``[x0, r0]`` between lifted geodesics."""
    d01 = np.sqrt(r0 * r0 + r1 * r1 - 2 * r0 * r1 * np.cos(phi01))
    d02 = np.sqrt(r0 * r0 + r2 * r2 - 2 * r0 * r2 * np.cos(phi02))
    if r0 <= 0 or d01 <= 0 or d02 <= 0:
        raise GeometryError("vertex coincides with an endpoint")
    num = ((r0 - r1 * np.cos(phi01)) * (r0 - r2 * np.cos(phi02))
           + r1 * r2 * np.sin(phi01) * np.sin(phi02) * cos_base)
    return _clamp(float(num / (d01 * d02)))


def base_angle_from_cone(r0, r1, r2, phi01, phi02, cos_cone):
    """Inverse of :func:`cone_angle_from_base` (needs both base legs nondegenerate)."""
    d01 = np.sqrt(r0 * r0 + r1 * r1 - 2 * r0 * r1 * np.cos(phi01))
    d02 = np.sqrt(r0 * r0 + r2 * r2 - 2 * r0 * r2 * np.cos(phi02))
    den = r1 * r2 * np.sin(phi01) * np.sin(phi02)
    if den <= 0 or d01 <= 0 or d02 <= 0:
        raise GeometryError("base angle is undefined for degenerate legs")
    num = cos_cone * d01 * d02 - (r0 - r1 * np.cos(phi01)) * (r0 - r2 * np.cos(phi02))
    return _clamp(float(num / den))
