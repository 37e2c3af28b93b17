"""K-semiconcavity diagnostics along geodesics.

A function ``f`` on [0, 1] is ``K``-semiconcave when ``f - K t^2`` is concave.
Along a geodesic from ``x0`` to ``x1`` with observer ``x2`` we measure ``K`` in
units of ``d^2(x0, x1)``, i.e. the smallest ``K`` such that for all sub-arcs
``[t1, t2]`` and ``t`` in [0, 1]::

    f~(t) + K t (1 - t) d^2(x~0, x~1) >= (1 - t) f~(0) + t f~(1)

For ``f = d^2(x2, .)`` in flat space this ``K`` equals 1 (``f'' = 2 d^2``), so
reports also carry ``K_normalized = K - 1``, which vanishes for flat space
and for observers sitting at an endpoint of an exact parabola.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .angles import as_metric
from .errors import GeometryError, InputError

HALF_PI = np.pi / 2
VARIANTS = ("f1", "f2")


def sine_series_constant(tol=1e-15):
    """``C = sum_n 4 n pi^(2n-2) / (2n+1)!``, truncated once terms drop below ``tol``."""
    total, n = 0.0, 1
    while True:
        term = 4.0 * n * np.pi ** (2 * n - 2) / factorial(2 * n + 1)
        total += term
        if term < tol:
            return total
        n += 1


def M_constant(D):
    """``max_{y in [0, 2D]} y / sin(y) = 2D / sin(2D)`` for ``0 <= D < pi/2``."""
    if not 0 <= D < HALF_PI:
        raise InputError("ball radius must lie in [0, pi/2)")
    if D == 0:
        return 1.0
    return 2 * D / np.sin(2 * D)


def radius_lower_bound(r0, r1, phi):
    """Infimum over t of the cone geodesic radius between radii r0, r1 at base distance phi."""
    if phi >= np.pi:
        return 0.0
    d2 = r0 * r0 + r1 * r1 - 2 * r0 * r1 * np.cos(phi)
    if d2 <= 0:
        return float(min(r0, r1))
    # vertex of the quadratic t -> rho^2(t)
    t_star = (r0 * r0 - r0 * r1 * np.cos(phi)) / d2
    if 0 < t_star < 1:
        return float(r0 * r1 * np.sin(phi) / np.sqrt(d2))
    return float(min(r0, r1))


@dataclass(frozen=True)
class TransferConstants:
    C: float
    M: float
    D: float
    r_min: float
    r_max: float

    def __post_init__(self):
        if not (self.C > 0 and 0 <= self.D < HALF_PI and self.r_min > 0):
            raise InputError("invalid transfer constants")


def transfer_constants(r0, r1, D, r_min=None):
    """Constants for the cone transfer; ``r_min`` defaults to the worst case ``phi = 2D``."""
    if r_min is None:
        r_min = radius_lower_bound(r0, r1, 2 * D)
    return TransferConstants(sine_series_constant(), M_constant(D), D, float(r_min), float(max(r0, r1)))


def transfer_f1_to_f2(K, D, d01):
    """Semiconcavity constant for ``d^2`` given one for ``1 - cos d`` (both scaled by ``d01^2``)."""
    if not D < HALF_PI:
        raise InputError("ball radius must be below pi/2")
    if K <= 0:
        raise InputError("transfer needs K > 0")
    return (1.0 + (1.0 + K) / (np.pi - 2 * D)) * d01 ** 2


def transfer_f2_to_f1(K, d01):
    """Semiconcavity constant for ``1 - cos d`` given one for ``d^2``."""
    if K <= 0:
        raise InputError("transfer needs K > 0")
    return (1.0 + K) * d01 ** 2


def cone_transfer_A(K, r0, r1, r2, D, r_min=None):
    """Cone constant from a base constant along the lifted geodesic."""
    if min(r0, r1, r2) <= 0:
        raise InputError("radii must be positive")
    tc = transfer_constants(r0, r1, D, r_min)
    C, M = tc.C, tc.M
    return r2 * (4 * C * M ** 3 + (K + 1) * M ** 2) / (4 * tc.r_min) + 1.0


def cone_transfer_B(K, r0, r2, D, r1=None, r_min=None):
    """Base constant (for ``1 - cos d``) from a cone constant; needs equal endpoint radii."""
    if r1 is not None and abs(r1 - r0) > 1e-12 * max(1.0, r0):
        raise InputError("cone transfer B requires r0 == r1")
    if min(r0, r2) <= 0:
        raise InputError("radii must be positive")
    tc = transfer_constants(r0, r0, D, r_min)
    C, M = tc.C, tc.M
    return 2 * C * M + (K - 1) * M ** 2 / (tc.r_min * r2 * np.cos(D) ** 4)


@dataclass(frozen=True)
class SemiconcReport:
    K: float
    K_normalized: float
    n: int
    interval: tuple
    worst: tuple
    d01: float
    variant: str

    def satisfied(self, K):
        """Whether all sampled inequalities hold with constant K (units of d^2(x0, x1))."""
        return K >= self.K


def semiconcavity_K(ts, f, d2):
    """Smallest K making every sampled three-point inequality hold.

    ``ts`` are increasing curve parameters, ``f`` the function values there
    and ``d2[i, j]`` the squared distance between curve points i and j.
    Returns ``(K, (t1, t2, t))`` for the worst triple.
    """
    ts = np.asarray(ts, float)
    f = np.asarray(f, float)
    n = len(ts)
    best, worst = -np.inf, None
    for i in range(n - 2):
        for j in range(i + 2, n):
            k = np.arange(i + 1, j)
            tau = (ts[k] - ts[i]) / (ts[j] - ts[i])
            den = tau * (1 - tau) * d2[i, j]
            if d2[i, j] <= 0:
                continue
            ratio = ((1 - tau) * f[i] + tau * f[j] - f[k]) / den
            a = int(np.argmax(ratio))
            if ratio[a] > best:
                best, worst = float(ratio[a]), (float(ts[i]), float(ts[j]), float(tau[a]))
    if worst is None:
        raise GeometryError("zero-length geodesic")
    return best, worst


def estimate_K(metric, curve, observer, variant="f2", n=33, interval=(0.0, 1.0), length=None):
    """Estimate the semiconcavity constant of ``d^2(observer, curve(t))`` (``f2``)
    or ``1 - cos d(observer, curve(t))`` (``f1``) along ``curve``.

    Parameters
    ----------
    metric
        Anything accepted by :func:`hkcone.angles.as_metric`.
    curve
        Constant-speed geodesic, callable on [0, 1].
    n
        Number of grid points on ``interval`` (at least 33 for reported estimates).
    length
        Length of ``curve`` if known; avoids recomputing pairwise distances.
    """
    if variant not in VARIANTS:
        raise InputError(f"variant must be one of {VARIANTS}")
    if n < 3:
        raise InputError("grid needs at least 3 points")
    dist = as_metric(metric)
    a, b = interval
    ts = np.linspace(a, b, n)
    pts = [curve(t) for t in ts]
    obs = np.array([dist(observer, p) for p in pts])
    f = obs ** 2 if variant == "f2" else 1.0 - np.cos(obs)
    if length is None:
        d2 = np.array([[dist(p, q) ** 2 for q in pts] for p in pts])
        d01 = float(dist(curve(0.0), curve(1.0)))
    else:
        d2 = (np.subtract.outer(ts, ts) * length) ** 2
        d01 = float(length)
    if d01 <= 0:
        raise GeometryError("zero-length geodesic")
    K, worst = semiconcavity_K(ts, f, d2)
    return SemiconcReport(K, K - 1.0, n, (float(a), float(b)), worst, d01, variant)
