"""Hellinger-Kantorovich and spherical HK distances, geodesics and cone lifts.

Geodesics are synthesised from an optimal LET plan: every plan entry
``H_ij = h`` becomes a cone geodesic from ``[x_i, 1/sqrt(sigma0_i)]`` to
``[y_j, 1/sqrt(sigma1_j)]`` carrying weight ``h``, which deposits mass
``h rho(t)^2`` at its base point. Atoms outside transport range run
radially into (or out of) the apex, so their mass scales like ``(1-t)^2``
or ``t^2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cone import (ConeGeodesic, cone_distance_sq, inverse_fraction,
                   rescale_geodesic)
from .errors import GeometryError, InputError
from .let_solver import DiscreteMeasure, LetProblem, solve_let
from .metric_base import BaseGeodesic, MetricSpace, pairwise_distance, point_distance

HALF_PI = np.pi / 2
MERGE_TOL = 1e-12


def hk_squared(mu0, mu1, delta, tol=1e-8):
    return solve_let(LetProblem(mu0, mu1, delta), tol=tol).value


def hk(mu0, mu1, delta, tol=1e-8):
    """Hellinger-Kantorovich distance."""
    return float(np.sqrt(max(hk_squared(mu0, mu1, delta, tol), 0.0)))


def shk_from_hk2(hk2):
    return float(np.arccos(np.clip(1.0 - hk2 / 2.0, -1.0, 1.0)))


def shk(nu0, nu1, delta, tol=1e-8):
    """Spherical HK distance between probability measures, in [0, pi/2]."""
    for nu in (nu0, nu1):
        if not nu.is_probability():
            raise InputError("spherical HK distance needs probability measures")
    return shk_from_hk2(hk_squared(nu0, nu1, delta, tol))


# -- scaling ----------------------------------------------------------------

@dataclass(frozen=True)
class ScalingCheck:
    residual: float
    plan_deviation: float
    marginal_deviation: float
    lhs: float
    rhs: float


def scaling_check(mu0, mu1, r0, r1, delta, tol=1e-8):
    """Compare ``HK^2(r0^2 mu0, r1^2 mu1)`` with the scaling formula and ``r0 r1 H``."""
    if r0 < 0 or r1 < 0:
        raise InputError("scale factors must be nonnegative")
    base = solve_let(LetProblem(mu0, mu1, delta), tol=tol)
    s0, s1 = mu0.scaled(r0 * r0), mu1.scaled(r1 * r1)
    scaled = solve_let(LetProblem(s0, s1, delta), tol=tol)
    rhs = r0 * r1 * base.value + (r0 * r0 - r0 * r1) * mu0.mass + (r1 * r1 - r0 * r1) * mu1.mass
    target = r0 * r1 * base.plan
    if scaled.plan.shape == target.shape:
        plan_dev = float(np.max(np.abs(scaled.plan - target), initial=0.0))
        marg = max(np.max(np.abs(scaled.eta0 - target.sum(axis=1)), initial=0.0),
                   np.max(np.abs(scaled.eta1 - target.sum(axis=0)), initial=0.0))
    else:
        # a zero scale factor empties one side: no plan survives
        plan_dev = float(np.max(np.abs(target), initial=0.0))
        marg = plan_dev
    return ScalingCheck(scaled.value - rhs, plan_dev, float(marg), scaled.value, rhs)


def scaling_residual(mu0, mu1, r0, r1, delta, tol=1e-8):
    return scaling_check(mu0, mu1, r0, r1, delta, tol).residual


# -- geodesics --------------------------------------------------------------

@dataclass(frozen=True)
class Ray:
    """One transported (or created/annihilated) piece of mass.

    ``i``/``j`` index atoms of mu0/mu1, ``-1`` standing for the apex.
    """

    i: int
    j: int
    weight: float
    curve: object

    def mass(self, t):
        return self.weight * self.curve.radius(t) ** 2

    def position(self, t):
        return self.curve.base_point(t)


def _radial(kind, x, r0, r1, delta):
    return ConeGeodesic(BaseGeodesic(kind, np.asarray(x), np.asarray(x)), r0, r1, delta)


@dataclass(frozen=True, eq=False)
class MeasureGeodesic:
    kind: str
    delta: float
    rays: tuple
    hk2: float
    m0: float
    m1: float

    def mass(self, t):
        """Total mass of the curve at time t from the rays."""
        return float(sum(r.mass(t) for r in self.rays))

    def mass_law(self, t):
        return (1 - t) * self.m0 + t * self.m1 - t * (1 - t) * self.hk2

    def at(self, t):
        """Snapshot as a :class:`DiscreteMeasure` on a fresh space (coincident atoms merged)."""
        if not 0 <= t <= 1:
            raise InputError("t must lie in [0, 1]")
        pos, mass = [], []
        for r in self.rays:
            m = r.mass(t)
            if m <= 0:
                continue
            pos.append(np.atleast_1d(np.asarray(r.position(t), float)))
            mass.append(m)
        return _merge(self.kind, pos, mass)

    def rescaled(self, a0, a1):
        """The curve ``A(t) z(B(t))`` applied ray by ray."""
        rays = tuple(Ray(r.i, r.j, r.weight, rescale_geodesic(r.curve, a0, a1)) for r in self.rays)
        return MeasureGeodesic(self.kind, self.delta, rays,
                               a0 * a1 * self.hk2 + (a0 * a0 - a0 * a1) * self.m0 + (a1 * a1 - a0 * a1) * self.m1,
                               a0 * a0 * self.m0, a1 * a1 * self.m1)

    def table(self, ts):
        """Rows ``(t, atom, coordinates..., mass)`` for CSV output."""
        rows = []
        for t in ts:
            snap = self.at(float(t))
            for k, (p, w) in enumerate(zip(snap.coords, snap.weights)):
                rows.append([float(t), k, *np.atleast_1d(p).tolist(), float(w)])
        return rows


def _merge(kind, pos, mass):
    if not pos:
        sp = MetricSpace(kind, np.zeros((0, 3 if kind == "sphere" else 1)), np.zeros((0, 0)))
        return DiscreteMeasure.zero(sp)
    coords = np.array([p if kind != "circle" else p[0] for p in pos])
    dist = pairwise_distance(kind, coords, coords)
    keep, weights = [], []
    owner = -np.ones(len(coords), int)
    for k in range(len(coords)):
        if owner[k] >= 0:
            continue
        group = np.flatnonzero((dist[k] <= MERGE_TOL) & (owner < 0))
        owner[group] = len(keep)
        keep.append(k)
        weights.append(float(np.sum(np.asarray(mass)[group])))
    sp = MetricSpace.from_coords(kind, coords[keep], validate=False)
    return DiscreteMeasure(sp, np.arange(len(keep)), np.array(weights))


def geodesic_from_solution(sol):
    """Constant-speed HK geodesic built from an optimal LET solution."""
    p = sol.problem
    kind = p.mu0.space.kind
    if kind == "graph":
        raise GeometryError("geodesics need a base space with interpolation")
    c0, c1 = p.mu0.coords, p.mu1.coords
    rays = []
    ii, jj = np.nonzero(sol.plan > 0)
    for i, j in zip(ii, jj):
        s0, s1 = sol.sigma0[i], sol.sigma1[j]
        if s0 <= 0 or s1 <= 0:
            raise GeometryError("matched atom with zero density: solution is not optimal")
        g = ConeGeodesic(BaseGeodesic(kind, c0[i], c1[j]), 1 / np.sqrt(s0), 1 / np.sqrt(s1), p.delta)
        rays.append(Ray(int(i), int(j), float(sol.plan[i, j]), g))
    # atoms without transport partner (or with sigma = 0)
    matched0 = sol.plan.sum(axis=1) > 0
    matched1 = sol.plan.sum(axis=0) > 0
    for i in np.flatnonzero(~matched0):
        rays.append(Ray(int(i), -1, float(p.mu0.weights[i]), _radial(kind, c0[i], 1.0, 0.0, p.delta)))
    for j in np.flatnonzero(~matched1):
        rays.append(Ray(-1, int(j), float(p.mu1.weights[j]), _radial(kind, c1[j], 0.0, 1.0, p.delta)))
    return MeasureGeodesic(kind, p.delta, tuple(rays), sol.value, p.mu0.mass, p.mu1.mass)


def hk_geodesic(mu0, mu1, delta, tol=1e-8):
    return geodesic_from_solution(solve_let(LetProblem(mu0, mu1, delta), tol=tol))


def compare_geodesics(g1, g2, ts, tol=1e-12):
    """Largest mass or position mismatch between rays with the same ``(i, j)`` key."""
    k1 = {(r.i, r.j): r for r in g1.rays}
    k2 = {(r.i, r.j): r for r in g2.rays}
    worst = 0.0
    for t in ts:
        for key in set(k1) | set(k2):
            r1, r2 = k1.get(key), k2.get(key)
            if r1 is None or r2 is None:
                worst = max(worst, (r1 or r2).mass(t))
                continue
            worst = max(worst, abs(r1.mass(t) - r2.mass(t)))
            if min(r1.mass(t), r2.mass(t)) > tol:
                worst = max(worst, point_distance(g1.kind, r1.position(t), r2.position(t)))
    return worst


@dataclass(frozen=True, eq=False)
class SphericalGeodesic:
    """Probability-valued curve ``nu(t) = mu(s(t)) / m(s(t))``."""

    geodesic: MeasureGeodesic
    shk: float

    @property
    def r0(self):
        return np.sqrt(self.geodesic.m0)

    @property
    def r1(self):
        return np.sqrt(self.geodesic.m1)

    def sigma(self, t):
        if self.shk <= 1e-12:
            # limit of the reparametrisation as the angle vanishes
            return self.r0 * t / (self.r1 * (1 - t) + self.r0 * t)
        return float(inverse_fraction(t, self.r0, self.r1, self.shk))

    def at(self, t):
        snap = self.geodesic.at(self.sigma(t))
        return snap.normalized()


def project_geodesic_to_sphere(g):
    """Project an HK geodesic onto probability measures (SHK geodesic)."""
    if g.m0 <= 0 or g.m1 <= 0:
        raise GeometryError("projection needs endpoints of positive mass")
    cos_shk = (g.m0 + g.m1 - g.hk2) / (2 * np.sqrt(g.m0 * g.m1))
    return SphericalGeodesic(g, float(np.arccos(np.clip(cos_shk, -1.0, 1.0))))


# -- cone lift --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LiftedPlan:
    """Discrete plan on cone x cone: pair k couples ``[x_src, r0]`` with ``[y_dst, r1]``.

    ``src``/``dst`` index atoms of mu0/mu1, ``-1`` marking the apex.
    """

    src: np.ndarray
    dst: np.ndarray
    r0: np.ndarray
    r1: np.ndarray
    weight: np.ndarray
    phi: np.ndarray
    n0: int
    n1: int
    cutoff: float = HALF_PI

    def cost(self):
        d2 = cone_distance_sq(self.r0, self.r1, self.phi, self.cutoff)
        return float(np.sum(self.weight * d2))

    def marginals(self):
        """Projections ``sum weight * r^2`` onto the atoms of mu0 and mu1."""
        m0 = np.zeros(self.n0)
        m1 = np.zeros(self.n1)
        s, d = self.src >= 0, self.dst >= 0
        np.add.at(m0, self.src[s], (self.weight * self.r0 ** 2)[s])
        np.add.at(m1, self.dst[d], (self.weight * self.r1 ** 2)[d])
        return m0, m1

    def radii_range(self):
        r = np.concatenate([self.r0[self.src >= 0], self.r1[self.dst >= 0]])
        return float(r.min()), float(r.max())


def cone_lift_certificate(sol):
    """Lift an optimal solution to the cone; its cost equals ``sol.value``."""
    p = sol.problem
    src, dst, r0, r1, w, phi = [], [], [], [], [], []
    ii, jj = np.nonzero(sol.plan > 0)
    for i, j in zip(ii, jj):
        src.append(i)
        dst.append(j)
        r0.append(1 / np.sqrt(sol.sigma0[i]))
        r1.append(1 / np.sqrt(sol.sigma1[j]))
        w.append(sol.plan[i, j])
        phi.append(p.delta * p.dist01[i, j])
    for i in np.flatnonzero(sol.plan.sum(axis=1) <= 0):
        src.append(i)
        dst.append(-1)
        r0.append(1.0)
        r1.append(0.0)
        w.append(p.mu0.weights[i])
        phi.append(0.0)
    for j in np.flatnonzero(sol.plan.sum(axis=0) <= 0):
        src.append(-1)
        dst.append(j)
        r0.append(0.0)
        r1.append(1.0)
        w.append(p.mu1.weights[j])
        phi.append(0.0)
    arr = lambda v, t=float: np.asarray(v, dtype=t)
    return LiftedPlan(arr(src, int), arr(dst, int), arr(r0), arr(r1), arr(w), arr(phi),
                      len(p.mu0), len(p.mu1))


def dilate(plan, theta):
    """Divide the radii of pair k by ``theta_k`` and multiply its weight by ``theta_k^2``."""
    theta = np.broadcast_to(np.asarray(theta, dtype=float), plan.weight.shape)
    if np.any(theta <= 0):
        raise InputError("dilation factors must be positive")
    return LiftedPlan(plan.src, plan.dst, plan.r0 / theta, plan.r1 / theta, plan.weight * theta ** 2,
                      plan.phi, plan.n0, plan.n1, plan.cutoff)
