"""Doubling diagnostics and density-bounded measure classes on finite spaces.

All balls are closed, ``B(x, r) = {y : d(x, y) <= r}``, and every center
``x`` ranges over the points of the finite space. Constants are *measured*
on the space at hand, so they are the smallest values making the defining
inequalities true there, not a priori bounds.

Two classes of measures relative to a reference measure ``L`` are used:

* ``Mbar(delta)``: ``delta <= dmu/dL <= 1/delta`` on the support of ``L``;
* ``Mtilde(d1, d2)``: ``d2 <= mu(B(x, d1)) / L(B(x, d1)) <= 1/d2`` for every x.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, InputError
from .hk_space import geodesic_from_solution, hk, project_geodesic_to_sphere, shk
from .let_solver import DiscreteMeasure, LetProblem, solve_let
from .metric_base import METRIC_TOL
from .semiconcavity import SemiconcReport, semiconcavity_K

HALF_PI = np.pi / 2


def _check_reference(space, L):
    if L.space is not space and not (L.space.kind == space.kind
                                     and np.array_equal(L.space.dist, space.dist)):
        raise InputError("reference measure lives on a different space")
    if len(L) == 0:
        raise InputError("reference measure is zero")


def _ball_masses(dist, dense, radius):
    """``m[x] = sum of dense over the closed ball B(x, radius)``."""
    return (dist <= radius + METRIC_TOL) @ dense


# -- doubling ---------------------------------------------------------------

def covering_number(space, center, R, r):
    """Number of ``r``-balls (centred at space points) a greedy pass uses to cover ``B(center, R)``."""
    d = space.dist
    todo = np.flatnonzero(d[center] <= R + METRIC_TOL)
    count = 0
    while len(todo):
        c = todo[0]
        todo = todo[d[c, todo] > r + METRIC_TOL]
        count += 1
    return count


def covering_constant(space, R, r):
    """Largest greedy covering count of an ``R``-ball by ``r``-balls over all centers."""
    if r <= 0 or R < r:
        raise InputError("covering needs 0 < r <= R")
    return max(covering_number(space, x, R, r) for x in range(len(space)))


def measure_ratio(space, L, D2, D1):
    """``max_x L(B(x, D2)) / L(B(x, D1))``; ``inf`` if some ``B(x, D1)`` is empty but ``B(x, D2)`` is not."""
    dense = L.dense()
    big = _ball_masses(space.dist, dense, D2)
    small = _ball_masses(space.dist, dense, D1)
    if np.any((small <= 0) & (big > 0)):
        return np.inf
    live = big > 0
    return float(np.max(big[live] / small[live], initial=1.0))


def local_doubling_constant(space, L, ratio, M):
    """Measured ``Cbar_M(ratio)``: sup of ``L(B(x, D2)) / L(B(x, D2/ratio))`` over all ``D2 <= M``.

    Ball masses are step functions of the radius, so the sup is attained
    when ``D2`` is one of the distances from x (or ``M`` itself).
    """
    if ratio < 1 or M <= 0:
        raise InputError("need ratio >= 1 and M > 0")
    dense = L.dense()
    d = space.dist
    best = 1.0
    for x in range(len(space)):
        radii = np.unique(np.append(d[x][(d[x] > 0) & (d[x] <= M)], M))
        for D2 in radii:
            big = dense[d[x] <= D2 + METRIC_TOL].sum()
            small = dense[d[x] <= D2 / ratio + METRIC_TOL].sum()
            if big <= 0:
                continue
            if small <= 0:
                return np.inf
            best = max(best, big / small)
    return float(best)


@dataclass(frozen=True)
class DoublingReport:
    scales: tuple
    covering: tuple
    measure: tuple
    max_scale: float
    failures: tuple = ()

    @property
    def ok(self):
        return not self.failures

    def to_json(self):
        return {"scales": [list(s) for s in self.scales], "covering": list(self.covering),
                "measure": [None if not np.isfinite(m) else m for m in self.measure],
                "max_scale": self.max_scale, "failures": [list(f) for f in self.failures],
                "ok": self.ok}


def doubling_constants(space, L, scales):
    """Covering and measure-doubling constants for each ``(D1, D2)`` pair.

    Scales at which some small ball carries no reference mass (while the
    large one does) are listed in ``failures`` and get measure constant inf.
    """
    _check_reference(space, L)
    scales = tuple((float(a), float(b)) for a, b in scales)
    if not scales:
        raise InputError("no scales given")
    cov, meas, bad = [], [], []
    for D1, D2 in scales:
        if not 0 < D1 <= D2:
            raise InputError("scales need 0 < D1 <= D2")
        cov.append(covering_constant(space, D2, D1))
        m = measure_ratio(space, L, D2, D1)
        meas.append(m)
        if not np.isfinite(m):
            bad.append((D1, D2))
    return DoublingReport(scales, tuple(cov), tuple(meas), max(s[1] for s in scales), tuple(bad))


def reference_transform(space, L_tilde, anchor, C2=None):
    """Finite reference measure ``L(dx) = (1 + C2)^(-2 d(anchor, x)) L_tilde(dx)``.

    ``C2`` defaults to the measured global doubling constant of ``L_tilde``
    at ratio 2. Returns ``(L, C2)``.
    """
    _check_reference(space, L_tilde)
    if C2 is None:
        C2 = local_doubling_constant(space, L_tilde, 2.0, max(space.diameter, 1e-300))
    if not np.isfinite(C2) or C2 < 1:
        raise InputError("doubling constant must be finite and >= 1")
    factor = (1.0 + C2) ** (-2.0 * space.dist[anchor, L_tilde.support])
    return DiscreteMeasure(space, L_tilde.support, L_tilde.weights * factor), float(C2)


# -- classes ----------------------------------------------------------------

@dataclass(frozen=True)
class MeasureClass:
    """``tag`` is ``"Mbar"`` (params ``(delta,)``) or ``"Mtilde"`` (params ``(d1, d2)``)."""

    tag: str
    params: tuple

    def __post_init__(self):
        if self.tag == "Mbar":
            if len(self.params) != 1 or not 0 < self.params[0] <= 1:
                raise InputError("Mbar needs one density bound in (0, 1]")
        elif self.tag == "Mtilde":
            if len(self.params) != 2 or self.params[0] <= 0 or not 0 < self.params[1] <= 1:
                raise InputError("Mtilde needs d1 > 0 and d2 in (0, 1]")
        else:
            raise InputError(f"unknown class {self.tag!r}")

    @classmethod
    def mbar(cls, delta):
        return cls("Mbar", (float(delta),))

    @classmethod
    def mtilde(cls, d1, d2):
        return cls("Mtilde", (float(d1), float(d2)))


@dataclass(frozen=True)
class ClassMembership:
    measure: DiscreteMeasure = field(repr=False)
    cls: MeasureClass
    reference: DiscreteMeasure = field(repr=False)
    member: bool
    ratios: np.ndarray = field(repr=False)
    witness: int
    lo: float
    hi: float

    def to_json(self):
        return {"class": self.cls.tag, "params": list(self.cls.params), "member": self.member,
                "witness": self.witness, "min_ratio": self.lo, "max_ratio": self.hi}


def _ratios(mu, L, cls):
    if cls.tag == "Mbar":
        dense_mu, dense_L = mu.dense(), L.dense()
        if np.any((dense_mu > 0) & (dense_L <= 0)):
            raise InputError("measure charges points without reference mass")
        return L.support, dense_mu[L.support] / dense_L[L.support]
    d1 = cls.params[0]
    num = _ball_masses(mu.space.dist, mu.dense(), d1)
    den = _ball_masses(L.space.dist, L.dense(), d1)
    if np.any(den <= 0):
        raise InputError(f"some ball of radius {d1} carries no reference mass")
    return np.arange(len(L.space)), num / den


def class_membership(mu, L, cls):
    """Check ``mu`` against ``Mbar(delta)`` (atom-wise densities) or ``Mtilde(d1, d2)`` (ball ratios)."""
    _check_reference(mu.space, L)
    where, r = _ratios(mu, L, cls)
    bound = cls.params[0] if cls.tag == "Mbar" else cls.params[1]
    # relative slack absorbs rounding in the ratios
    bad = (r < bound * (1 - 1e-12)) | (r > (1 + 1e-12) / bound)
    witness = int(where[np.argmax(bad)]) if bad.any() else -1
    return ClassMembership(mu, cls, L, bool(not bad.any()), r, witness,
                           float(r.min()), float(r.max()))


def snapshot_ratios(snapshot, L, d1):
    """Ball ratios ``mu(B(x, d1)) / L(B(x, d1))`` at every point x of ``L.space`` for a measure
    supported off the space (e.g. a geodesic snapshot)."""
    sp = L.space
    den = _ball_masses(sp.dist, L.dense(), d1)
    if np.any(den <= 0):
        raise InputError(f"some ball of radius {d1} carries no reference mass")
    if len(snapshot) == 0:
        return np.zeros(len(sp))
    d = sp.distances_to(snapshot.coords)
    num = (d <= d1 + METRIC_TOL) @ snapshot.weights
    return num / den


# -- density and transport bounds -------------------------------------------

@dataclass(frozen=True)
class DensityBounds:
    C_min: float
    C_max: float
    frak_D: float
    C_cover: float
    C_measure: float
    C_tilde: float
    sigma_min: float
    sigma_max: float
    transport_max: float
    R_min: float
    R_max: float
    radii: tuple

    @property
    def ok(self):
        return (self.C_min <= self.sigma_min * (1 + 1e-9) and self.sigma_max <= self.C_max * (1 + 1e-9)
                and self.transport_max <= self.frak_D + 1e-12 and self.frak_D < HALF_PI
                and self.R_min <= self.radii[0] * (1 + 1e-9) and self.radii[1] <= self.R_max * (1 + 1e-9))

    def to_json(self):
        out = {k: getattr(self, k) for k in ("C_min", "C_max", "frak_D", "C_cover", "C_measure",
                                              "C_tilde", "sigma_min", "sigma_max", "transport_max",
                                              "R_min", "R_max")}
        out["radii"] = list(self.radii)
        out["ok"] = self.ok
        return out


def density_constants(space, L, delta, d1, d2):
    """``(C_min, C_max, C, Cbar, C_tilde)`` for ``Mtilde(d1, d2)`` at HK scale ``delta``."""
    if not 0 < d1 < np.pi / (2 * delta):
        raise InputError("need 0 < d1 < pi / (2 delta)")
    R = np.pi / (2 * delta) + d1
    ratio = R / d1
    C = covering_constant(space, R, d1)
    Cbar = local_doubling_constant(space, L, ratio, np.pi / delta)
    C_tilde = float(np.sqrt(C * Cbar))
    C_min = np.cos(delta * d1) ** 2 * d2 ** 2 / C_tilde
    return float(C_min), float(1.0 / C_min), C, Cbar, C_tilde


def density_bounds_check(sol, L, d1, d2):
    """Compare calibration densities and transport lengths of ``sol`` with the uniform bounds.

    Both marginals must be certified members of ``Mtilde(d1, d2)`` relative
    to ``L``; otherwise :class:`InputError` is raised.
    """
    p = sol.problem
    cls = MeasureClass.mtilde(d1, d2)
    for mu in (p.mu0, p.mu1):
        if not class_membership(mu, L, cls).member:
            raise InputError("marginal is not certified in the class")
    C_min, C_max, C, Cbar, C_tilde = density_constants(L.space, L, p.delta, d1, d2)
    # sigma0 sigma1 = cos^2(delta d) on the plan support
    frak_D = float(np.arccos(min(C_min, 1.0)))
    matched0 = sol.plan.sum(axis=1) > 0
    matched1 = sol.plan.sum(axis=0) > 0
    sig = np.concatenate([sol.sigma0[matched0], sol.sigma1[matched1]])
    supp = sol.plan > 0
    tmax = float(np.max(p.delta * p.dist01[supp], initial=0.0))
    radii = 1.0 / np.sqrt(sig) if len(sig) else np.array([1.0])
    return DensityBounds(C_min, C_max, frak_D, float(C), float(Cbar), C_tilde,
                         float(sig.min(initial=np.inf)), float(sig.max(initial=0.0)), tmax,
                         float(C_min / np.sqrt(C_max)), float(C_max / np.sqrt(C_min)),
                         (float(radii.min()), float(radii.max())))


# -- geodesic containment ---------------------------------------------------

@dataclass(frozen=True)
class ContainmentReport:
    d_tilde: float
    d1: float
    d2: float
    d2_lower: float
    d2_upper: float
    C_tilde_M: float
    C_upper: float
    ts: np.ndarray
    min_ratio: np.ndarray
    max_ratio: np.ndarray

    @property
    def ok(self):
        return bool(np.all(self.min_ratio >= self.d2 * (1 - 1e-9))
                    and np.all(self.max_ratio <= (1 + 1e-9) / self.d2))

    def to_json(self):
        return {"d_tilde": self.d_tilde, "d1": self.d1, "d2": self.d2, "d2_lower": self.d2_lower,
                "d2_upper": self.d2_upper, "C_tilde_M": self.C_tilde_M, "C_upper": self.C_upper,
                "t": self.ts.tolist(), "min_ratio": self.min_ratio.tolist(),
                "max_ratio": self.max_ratio.tolist(), "ok": self.ok}


def containment_parameters(L, delta_hk, rho, d_tilde):
    """``(d1, d2, d2_lower, d2_upper, C_tilde_M, C_upper)`` for endpoints in ``Mbar(rho)``.

    ``d_tilde < pi/2`` bounds ``delta_hk * d`` on the plan support. Masses
    starting within ``r = (pi - 2 d_tilde) / (4 delta_hk)`` of x stay within
    ``d1 = (pi + 2 d_tilde) / (4 delta_hk)`` and keep a quarter of their mass up
    to the midpoint, which gives ``d2_lower = rho / (4 C_tilde_M)`` with
    ``C_tilde_M = max_x L(B(x, d1)) / L(B(x, r))``. Conversely mass found in
    ``B(x, d1)`` at time t started or ends within ``d1 + d_tilde / delta_hk`` and
    radii along cone geodesics never exceed the larger endpoint radius, so
    ``mu_t(B(x, d1)) <= (2 / rho) L(B(x, d1 + d_tilde / delta_hk))``, giving
    ``d2_upper = rho / (2 C_upper)``.
    """
    if not 0 <= d_tilde < HALF_PI:
        raise InputError("transport bound must lie in [0, pi/2)")
    sp = L.space
    d1 = (np.pi + 2 * d_tilde) / (4 * delta_hk)
    r_small = (np.pi - 2 * d_tilde) / (4 * delta_hk)
    C_tilde_M = measure_ratio(sp, L, d1, r_small)
    C_upper = measure_ratio(sp, L, d1 + d_tilde / delta_hk, d1)
    d2_lower = rho / (4 * C_tilde_M)
    d2_upper = rho / (2 * C_upper)
    return float(d1), float(min(d2_lower, d2_upper, 1.0)), float(d2_lower), float(d2_upper), C_tilde_M, C_upper


def geodesic_containment_check(mu0, mu1, L, rho, delta_hk, grid=11, tol=1e-8):
    """Verify that the synthesised geodesic between ``Mbar(rho)`` endpoints stays in ``Mtilde(d1, d2)``.

    ``d_tilde`` is the measured transport bound ``max delta_hk d`` over the
    optimal plan's support.
    """
    cls = MeasureClass.mbar(rho)
    for mu in (mu0, mu1):
        if not class_membership(mu, L, cls).member:
            raise InputError("endpoint is not in the density class")
    sol = solve_let(LetProblem(mu0, mu1, delta_hk), tol=tol)
    supp = sol.plan > 0
    d_tilde = float(np.max(delta_hk * sol.problem.dist01[supp], initial=0.0))
    d1, d2, lo, hi, ctm, cup = containment_parameters(L, delta_hk, rho, d_tilde)
    g = geodesic_from_solution(sol)
    ts = np.linspace(0.0, 1.0, grid) if np.ndim(grid) == 0 else np.asarray(grid, float)
    mins, maxs = [], []
    for t in ts:
        r = snapshot_ratios(g.at(float(t)), L, d1)
        mins.append(r.min())
        maxs.append(r.max())
    return ContainmentReport(d_tilde, d1, d2, lo, hi, ctm, cup, ts, np.array(mins), np.array(maxs))


# -- semiconcavity on measure spaces ----------------------------------------

def hk_semiconcavity_estimate(mu0, mu1, mu2, delta, L=None, rho=None, n=33, variant="hk", tol=1e-8):
    """Estimate K for ``t -> HK^2(mu2, mu(t))`` (or ``SHK^2(nu2, nu(t))``) along a geodesic.

    K is reported in units of the squared geodesic length, as in
    :func:`hkcone.semiconcavity.estimate_K`. When ``L`` and ``rho`` are
    given all three measures must belong to ``Mbar(rho)`` relative to ``L``.
    In the ``shk`` variant the measures are normalised first.
    """
    if variant not in ("hk", "shk"):
        raise InputError("variant must be 'hk' or 'shk'")
    if n < 3:
        raise InputError("grid needs at least 3 points")
    if (L is None) != (rho is None):
        raise InputError("give both the reference measure and the density bound, or neither")
    if L is not None:
        cls = MeasureClass.mbar(rho)
        for mu in (mu0, mu1, mu2):
            if not class_membership(mu, L, cls).member:
                raise InputError("measure is not in the density class")
    ts = np.linspace(0.0, 1.0, n)
    g = geodesic_from_solution(solve_let(LetProblem(mu0, mu1, delta), tol=tol))
    if variant == "hk":
        length = float(np.sqrt(max(g.hk2, 0.0)))
        curve = g.at
        f = np.array([hk(mu2, curve(float(t)), delta, tol) ** 2 for t in ts])
    else:
        nu0, nu1, nu2 = mu0.normalized(), mu1.normalized(), mu2.normalized()
        sg = project_geodesic_to_sphere(geodesic_from_solution(solve_let(LetProblem(nu0, nu1, delta), tol=tol)))
        length = sg.shk
        f = np.array([shk(nu2, sg.at(float(t)), delta, tol) ** 2 for t in ts])
    if length <= 1e-12:
        raise GeometryError("degenerate geodesic: endpoints coincide")
    d2 = (np.subtract.outer(ts, ts) * length) ** 2
    K, worst = semiconcavity_K(ts, f, d2)
    return SemiconcReport(K, K - 1.0, n, (0.0, 1.0), worst, length, variant)
