"""Metric cone over a base space.

A cone point ``[x, r]`` pairs a base coordinate with a radius ``r >= 0``; all
points of radius zero are identified with the apex. The squared cone distance
is ``r0^2 + r1^2 - 2 r0 r1 cos(min(cutoff, phi))`` where ``phi`` is the base
distance (optionally multiplied by a length scale) and the cutoff is pi for the
true cone metric or pi/2 for the truncated variant used by transport lifts.

The scalar helpers below work directly on ``(r0, r1, phi)`` and are
vectorised over ``t``; :class:`Cone` and :class:`ConeGeodesic` wrap them for
actual base coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, InputError
from .metric_base import BaseGeodesic, point_distance

POINT_TOL = 1e-12


def cos_cut(phi, cutoff=np.pi):
    return np.cos(np.minimum(phi, cutoff))


def cone_distance_sq(r0, r1, phi, cutoff=np.pi):
    # (r0 - r1)^2 + 4 r0 r1 sin^2(phi/2) avoids cancellation for nearby points
    half = 0.5 * np.minimum(phi, cutoff)
    return (r0 - r1) ** 2 + 4.0 * r0 * r1 * np.sin(half) ** 2


def cone_distance(r0, r1, phi, cutoff=np.pi):
    """Cone distance between ``[x0, r0]`` and ``[x1, r1]`` with base distance phi."""
    if cutoff not in (np.pi, np.pi / 2):
        raise InputError("cutoff must be pi or pi/2")
    return np.sqrt(np.maximum(cone_distance_sq(r0, r1, phi, cutoff), 0.0))


def spherical_from_cone(D):
    """Recover the (truncated) base distance from the cone distance of unit-radius points."""
    D2 = np.asarray(D, dtype=float) ** 2
    if np.any(D2 > 4.0 + 1e-12) or np.any(D2 < 0):
        raise GeometryError("unit-radius cone distances satisfy D^2 <= 4")
    return np.arccos(np.clip(1.0 - D2 / 2.0, -1.0, 1.0))


def scaling_identity_residual(r0, r1, phi, rt0, rt1):
    """Defect of the two-parameter radius scaling identity.

    Compares ``d^2([x0, r0 rt0], [x1, r1 rt1])`` with
    ``rt0 rt1 d^2(z0, z1) + (rt0^2 - rt0 rt1) r0^2 + (rt1^2 - rt0 rt1) r1^2``.
    """
    if np.any(np.asarray(rt0) < 0) or np.any(np.asarray(rt1) < 0):
        raise InputError("scale factors must be nonnegative")
    lhs = cone_distance_sq(r0 * rt0, r1 * rt1, phi)
    rhs = (rt0 * rt1 * cone_distance_sq(r0, r1, phi)
           + (rt0 * rt0 - rt0 * rt1) * r0 * r0
           + (rt1 * rt1 - rt0 * rt1) * r1 * r1)
    return lhs - rhs


def radius_sq(t, r0, r1, phi):
    """Squared radius of the cone geodesic at time t."""
    t = np.asarray(t, dtype=float)
    return ((1 - t) ** 2 * r0 * r0 + t * t * r1 * r1
            + 2 * t * (1 - t) * r0 * r1 * cos_cut(phi))


def base_fraction(t, r0, r1, phi):
    """Fraction of the base geodesic reached by the cone geodesic at time t.

    Uses the two-argument arctangent form, valid for 0 < phi < pi.
    """
    t = np.asarray(t, dtype=float)
    num = t * r1 * np.sin(phi)
    den = (1 - t) * r0 + t * r1 * np.cos(phi)
    return np.arctan2(num, den) / phi


def inverse_fraction(t, r0, r1, phi):
    """Inverse of :func:`base_fraction`: cone time at which base fraction t is reached."""
    t = np.asarray(t, dtype=float)
    a = r0 * np.sin(t * phi)
    return a / (r1 * np.sin((1 - t) * phi) + a)


def projected_radius(t, r0, r1, phi):
    """Radius of the cone geodesic at cone time ``inverse_fraction(t)``."""
    t = np.asarray(t, dtype=float)
    return r0 * r1 * np.sin(phi) / (r1 * np.sin((1 - t) * phi) + r0 * np.sin(t * phi))


@dataclass(frozen=True)
class ConePoint:
    x: object
    r: float

    def __post_init__(self):
        if not self.r >= 0:
            raise InputError("cone radius must be nonnegative")

    @property
    def is_apex(self):
        return self.r <= POINT_TOL

    def scaled(self, c):
        return ConePoint(self.x, self.r * c)


@dataclass(frozen=True)
class Cone:
    """Cone over an analytic base kind, with base distances multiplied by ``scale``."""

    kind: str
    scale: float = 1.0

    def base_distance(self, x0, x1):
        return self.scale * point_distance(self.kind, x0, x1)

    def distance(self, z0, z1, cutoff=np.pi):
        if z0.is_apex or z1.is_apex:
            return abs(z0.r - z1.r)
        return float(cone_distance(z0.r, z1.r, self.base_distance(z0.x, z1.x), cutoff))

    def equal(self, z0, z1, tol=POINT_TOL):
        if z0.is_apex and z1.is_apex:
            return True
        return abs(z0.r - z1.r) <= tol and self.base_distance(z0.x, z1.x) <= tol

    def geodesic(self, z0, z1):
        return lift_geodesic(BaseGeodesic(self.kind, np.asarray(z0.x), np.asarray(z1.x)),
                             z0.r, z1.r, self.scale)


@dataclass(frozen=True)
class ConeGeodesic:
    """Constant-speed cone geodesic from ``[x0, r0]`` to ``[x1, r1]``.

    ``phi`` is the (scaled) base distance. Degenerate cases (phi == 0,
    phi >= pi, or an endpoint at the apex) run radially, through the apex
    when the base points differ.
    """

    base: BaseGeodesic
    r0: float
    r1: float
    scale: float = 1.0
    phi: float = field(init=False)

    def __post_init__(self):
        if self.r0 < 0 or self.r1 < 0:
            raise InputError("cone radii must be nonnegative")
        object.__setattr__(self, "phi", self.scale * self.base.length)

    @property
    def cone(self):
        return Cone(self.base.kind, self.scale)

    @property
    def z0(self):
        return ConePoint(self.base.start, self.r0)

    @property
    def z1(self):
        return ConePoint(self.base.end, self.r1)

    @property
    def degenerate(self):
        return (self.phi <= POINT_TOL or self.phi >= np.pi
                or self.r0 <= POINT_TOL or self.r1 <= POINT_TOL)

    @property
    def length(self):
        return float(cone_distance(self.r0, self.r1, self.phi))

    def radius(self, t):
        return np.sqrt(np.maximum(radius_sq(t, self.r0, self.r1, self.phi), 0.0))

    def zeta(self, t):
        t = np.asarray(t, dtype=float)
        if not self.degenerate:
            return base_fraction(t, self.r0, self.r1, self.phi)
        if self.phi <= POINT_TOL:
            return np.zeros_like(t)
        if self.r0 <= POINT_TOL:
            return np.where(t > 0, 1.0, 0.0)
        if self.r1 <= POINT_TOL:
            return np.where(t < 1, 0.0, 1.0)
        # through the apex: switch base point once the radius hits zero
        t_apex = self.r0 / (self.r0 + self.r1)
        return np.where(t <= t_apex, 0.0, 1.0)

    def base_point(self, t):
        z = self.zeta(t)
        if self.degenerate and self.phi >= np.pi:
            # base geodesic may not exist (antipodal); pick an endpoint
            return self.base.end if float(z) >= 0.5 else self.base.start
        return self.base(np.clip(z, 0.0, 1.0))

    def __call__(self, t):
        return ConePoint(self.base_point(t), float(self.radius(t)))


def lift_geodesic(base, r0, r1, scale=1.0):
    """Lift a base geodesic to the cone geodesic between ``[x0, r0]`` and ``[x1, r1]``."""
    return ConeGeodesic(base, float(r0), float(r1), float(scale))


@dataclass(frozen=True)
class ProjectedGeodesic:
    """Base geodesic recovered from a cone geodesic, with the reparametrisation."""

    geodesic: ConeGeodesic

    def sigma(self, t):
        g = self.geodesic
        return inverse_fraction(t, g.r0, g.r1, g.phi)

    def radius(self, t):
        g = self.geodesic
        return projected_radius(t, g.r0, g.r1, g.phi)

    @property
    def base(self):
        return self.geodesic.base

    def __call__(self, t):
        # x-bar(sigma(t)) = base(zeta(sigma(t))) = base(t)
        return self.geodesic.base_point(self.sigma(t))


def project_geodesic(geodesic):
    if geodesic.degenerate:
        raise GeometryError("projection needs 0 < phi < pi and positive radii")
    return ProjectedGeodesic(geodesic)


@dataclass(frozen=True)
class RescaledGeodesic:
    """``t -> A(t) z(B(t))`` with ``A(t) = a0 + (a1 - a0) t`` and ``B(t) = a1 t / A(t)``."""

    geodesic: ConeGeodesic
    a0: float
    a1: float

    def A(self, t):
        return self.a0 + (self.a1 - self.a0) * np.asarray(t, dtype=float)

    def B(self, t):
        t = np.asarray(t, dtype=float)
        a = self.A(t)
        with np.errstate(invalid="ignore", divide="ignore"):
            b = np.where(a > 0, self.a1 * t / np.where(a > 0, a, 1.0), 0.0)
        return np.clip(b, 0.0, 1.0)

    def radius(self, t):
        return self.A(t) * self.geodesic.radius(self.B(t))

    def base_point(self, t):
        return self.geodesic.base_point(self.B(t))

    def __call__(self, t):
        return ConePoint(self.base_point(t), float(self.radius(t)))

    @property
    def cone(self):
        return self.geodesic.cone


def rescale_geodesic(geodesic, a0, a1):
    if a0 < 0 or a1 < 0 or (a0 == 0 and a1 == 0):
        raise InputError("rescaling factors must be nonnegative and not both zero")
    return RescaledGeodesic(geodesic, float(a0), float(a1))
