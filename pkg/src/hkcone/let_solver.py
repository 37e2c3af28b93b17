"""Discrete logarithmic entropy-transport (LET) problem.

For measures ``mu0 = sum a_i delta_{x_i}`` and ``mu1 = sum b_j delta_{y_j}``
the LET functional of a plan ``H >= 0`` is::

    sum_i a_i F(eta0_i / a_i) + sum_j b_j F(eta1_j / b_j) + sum_ij L_ij H_ij

with ``F(s) = s log s - s + 1``, ``eta`` the marginals of ``H`` and
``L_ij = -2 log cos(delta d(x_i, y_j))`` (``+inf`` once ``delta d >= pi/2``).
Its minimum is ``HK_delta^2(mu0, mu1)``.

The solver works on the dual problem::

    max  sum a (1 - e^-phi) + sum b (1 - e^-psi)   s.t.  phi_i + psi_j <= L_ij

regularised by ``eps * sum a_i b_j exp((phi_i + psi_j - L_ij) / eps)``. It runs
log-domain scaling iterations at coarse ``eps`` and then a damped Newton
method on both potentials while ``eps`` is driven towards zero. Infinite
costs are handled by masking, never by large finite numbers. Every solve
ends with a certified bracket ``[dual lower bound, primal upper bound]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, InputError
from .metric_base import MetricSpace, pairwise_distance

HALF_PI = np.pi / 2
PRUNE = 1e-14


# -- measures ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Nonnegative finite measure with positive weights on distinct points of ``space``.

    The zero measure has empty support.
    """

    space: MetricSpace
    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        sup = np.asarray(self.support, dtype=int).reshape(-1)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if sup.shape != w.shape:
            raise InputError("support and weights must have the same length")
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise InputError("weights must be positive and finite")
        if len(np.unique(sup)) != len(sup):
            raise InputError("support indices must be distinct")
        if len(sup) and (sup.min() < 0 or sup.max() >= len(self.space)):
            raise InputError("support index outside the space")
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_dense(cls, space, values, tol=0.0):
        values = np.asarray(values, dtype=float)
        idx = np.flatnonzero(values > tol)
        return cls(space, idx, values[idx])

    @classmethod
    def zero(cls, space):
        return cls(space, np.zeros(0, int), np.zeros(0))

    @classmethod
    def from_json(cls, desc, space):
        return cls(space, desc.get("support", []), desc.get("weights", []))

    def to_json(self):
        return {"support": self.support.tolist(), "weights": self.weights.tolist()}

    def __len__(self):
        return len(self.support)

    @property
    def mass(self):
        return float(self.weights.sum())

    @property
    def coords(self):
        return self.space.points[self.support]

    def dense(self):
        out = np.zeros(len(self.space))
        out[self.support] = self.weights
        return out

    def scaled(self, c):
        if c < 0:
            raise InputError("scale factor must be nonnegative")
        if c == 0:
            return DiscreteMeasure.zero(self.space)
        return DiscreteMeasure(self.space, self.support, self.weights * c)

    def normalized(self):
        if self.mass <= 0:
            raise InputError("cannot normalise the zero measure")
        return self.scaled(1.0 / self.mass)

    def restrict(self, mask):
        mask = np.asarray(mask, bool)
        return DiscreteMeasure(self.space, self.support[mask], self.weights[mask])

    def is_probability(self, tol=1e-10):
        return abs(self.mass - 1.0) <= tol


def cross_distances(mu0, mu1):
    """Distances between the atoms of two measures.

    Measures may live on different spaces of the same analytic kind (e.g.
    snapshots of a geodesic); graph-kind measures must share their space.
    """
    if mu0.space is mu1.space:
        return mu0.space.dist[np.ix_(mu0.support, mu1.support)]
    if mu0.space.kind != mu1.space.kind:
        raise InputError("measures live on spaces of different kinds")
    if mu0.space.kind == "graph":
        if not np.array_equal(mu0.space.dist, mu1.space.dist):
            raise InputError("graph measures must share their space")
        return mu0.space.dist[np.ix_(mu0.support, mu1.support)]
    if len(mu0) == 0 or len(mu1) == 0:
        return np.zeros((len(mu0), len(mu1)))
    return pairwise_distance(mu0.space.kind, mu0.coords, mu1.coords)


# -- cost -------------------------------------------------------------------

def cost(delta, R):
    """``-2 log cos(R delta)`` if ``R delta < pi/2``, else ``+inf`` (vectorised)."""
    x = np.asarray(R, dtype=float) * delta
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(x < HALF_PI, -2.0 * np.log(np.cos(np.minimum(x, HALF_PI))), np.inf)
    return float(out) if out.ndim == 0 else out


def entropy_F(s):
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(s > 0, s * np.log(np.where(s > 0, s, 1.0)) - s + 1.0, 1.0)


# -- problem ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LetProblem:
    mu0: DiscreteMeasure
    mu1: DiscreteMeasure
    delta: float
    dist01: np.ndarray = field(init=False, repr=False)
    L: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.delta > 0:
            raise InputError("delta must be positive")
        d = cross_distances(self.mu0, self.mu1)
        object.__setattr__(self, "dist01", d)
        object.__setattr__(self, "L", np.asarray(cost(self.delta, d), dtype=float).reshape(d.shape))

    @property
    def finite(self):
        return np.isfinite(self.L)

    @property
    def cos2(self):
        """``cos^2_{pi/2}(delta d)`` on all atom pairs."""
        return np.cos(np.minimum(self.delta * self.dist01, HALF_PI)) ** 2

    def let_value(self, H):
        """LET functional of the plan ``H`` (``+inf`` if it charges infinite-cost pairs)."""
        H = np.asarray(H, dtype=float)
        if np.any(H[~self.finite] > 0):
            return np.inf
        a, b = self.mu0.weights, self.mu1.weights
        e0, e1 = H.sum(axis=1), H.sum(axis=0)
        ent = np.sum(a * entropy_F(e0 / a)) + np.sum(b * entropy_F(e1 / b))
        return float(ent + np.sum(np.where(self.finite, self.L, 0.0) * H))

    def dual_value(self, phi, psi):
        a, b = self.mu0.weights, self.mu1.weights
        return float(np.sum(a * -np.expm1(-phi)) + np.sum(b * -np.expm1(-psi)))


def reduced_couple(problem):
    """Split each measure into the part within transport range of the other and the rest.

    Returns ``(mu0', mu0'', mu1', mu1'')``.
    """
    F = problem.finite
    keep0 = F.any(axis=1) if F.size else np.zeros(len(problem.mu0), bool)
    keep1 = F.any(axis=0) if F.size else np.zeros(len(problem.mu1), bool)
    m0, m1 = problem.mu0, problem.mu1
    return m0.restrict(keep0), m0.restrict(~keep0), m1.restrict(keep1), m1.restrict(~keep1)


# -- solution ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LetSolution:
    """Optimal plan, calibration densities and value of a LET problem.

    ``sigma0``/``sigma1`` are marginal densities per support atom, exactly zero
    on atoms outside transport range.
    """

    problem: LetProblem
    plan: np.ndarray
    sigma0: np.ndarray
    sigma1: np.ndarray
    value: float
    diagnostics: dict

    @property
    def eta0(self):
        return self.plan.sum(axis=1)

    @property
    def eta1(self):
        return self.plan.sum(axis=0)

    @property
    def total(self):
        return float(self.plan.sum())

    def to_json(self):
        d = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.diagnostics.items()}
        return {"value": self.value, "H": self.plan.tolist(), "sigma0": self.sigma0.tolist(),
                "sigma1": self.sigma1.tolist(), "diagnostics": d}


# -- solver internals -------------------------------------------------------

def _lse(x, axis):
    # every row/column of the reduced problem has a finite entry, so the
    # shift is finite; scipy's logsumexp costs ~10x more per call at this size
    m = x.max(axis=axis, keepdims=True)
    return (m + np.log(np.exp(x - m).sum(axis=axis, keepdims=True))).squeeze(axis)


class _Dual:
    """Regularised dual objective on the reduced (finite-row/column) problem."""

    def __init__(self, a, b, L):
        self.a, self.b, self.L = a, b, L
        self.mask = np.isfinite(L)
        self.Lf = np.where(self.mask, L, 0.0)
        self.la, self.lb = np.log(a), np.log(b)
        self.n0, self.n1 = len(a), len(b)

    def log_plan(self, phi, psi, eps):
        E = (phi[:, None] + psi[None, :] - self.Lf) / eps
        return np.where(self.mask, self.la[:, None] + self.lb[None, :] + E, -np.inf)

    def plan(self, phi, psi, eps):
        with np.errstate(over="ignore"):
            return np.exp(self.log_plan(phi, psi, eps))

    def objective(self, x, eps):
        phi, psi = x[: self.n0], x[self.n0:]
        lp = self.log_plan(phi, psi, eps)
        if np.max(lp) > 700 or np.max(np.abs(phi)) > 700 or np.max(np.abs(psi)) > 700:
            return np.inf
        return float(np.sum(self.a * np.exp(-phi)) + np.sum(self.b * np.exp(-psi))
                     + eps * np.sum(np.exp(lp)))

    def grad_hess(self, x, eps):
        phi, psi = x[: self.n0], x[self.n0:]
        H = self.plan(phi, psi, eps)
        r, c = H.sum(axis=1), H.sum(axis=0)
        ea, eb = self.a * np.exp(-phi), self.b * np.exp(-psi)
        g = np.concatenate([r - ea, c - eb])
        n = self.n0 + self.n1
        K = np.zeros((n, n))
        K[: self.n0, : self.n0] = np.diag(r / eps + ea)
        K[self.n0:, self.n0:] = np.diag(c / eps + eb)
        K[: self.n0, self.n0:] = H / eps
        K[self.n0:, : self.n0] = H.T / eps
        return g, K, H

    def sinkhorn(self, phi, psi, eps, iters=500, tol=1e-12):
        k = eps / (1.0 + eps)
        for _ in range(iters):
            old = phi.copy()
            phi = -k * _lse(np.where(self.mask, self.lb[None, :] + (psi[None, :] - self.Lf) / eps, -np.inf), axis=1)
            psi = -k * _lse(np.where(self.mask, self.la[:, None] + (phi[:, None] - self.Lf) / eps, -np.inf), axis=0)
            if np.max(np.abs(phi - old)) < tol:
                break
        return phi, psi

    def newton(self, x, eps, max_iter=60):
        f = self.objective(x, eps)
        w = np.concatenate([self.a, self.b])
        it = 0
        for it in range(1, max_iter + 1):
            g, K, _ = self.grad_hess(x, eps)
            # marginals cannot be resolved beyond ~ulp(x) / eps
            rtol = max(1e-12, 64 * np.finfo(float).eps * (1.0 + np.max(np.abs(x))) / eps)
            if np.max(np.abs(g) / w) < rtol:
                return x, it, True
            d_scale = 1.0 / np.sqrt(np.maximum(np.diag(K), 1e-300))
            Ks = K * d_scale[:, None] * d_scale[None, :]
            try:
                step = -d_scale * np.linalg.solve(Ks, d_scale * g)
            except np.linalg.LinAlgError:
                step = -d_scale * np.linalg.lstsq(Ks, d_scale * g, rcond=None)[0]
            slope = float(g @ step)
            if slope >= 0:
                step, slope = -g, -float(g @ g)
            t = 1.0
            while True:
                xn = x + t * step
                fn = self.objective(xn, eps)
                if fn <= f + 1e-4 * t * slope:
                    break
                t *= 0.5
                if t < 1e-12:
                    return x, it, bool(np.max(np.abs(g) / w) < 1e3 * rtol)
            x, f = xn, fn
        g, _, _ = self.grad_hess(x, eps)
        return x, it, False


def _kkt_polish(a, b, L, phi, psi, eps, H0, max_rounds=20, max_newton=50):
    """Exact optimality system on an active set seeded by the entropic solution.

    Unknowns are the plan entries on the active set S and the log-densities
    ``u = log sigma0``, ``v = log sigma1``; the equations are
    ``u_i + v_j + L_ij = 0`` on S and the two marginal identities. The active
    set is updated until the plan is nonnegative and the inequality
    ``u_i + v_j + L_ij >= 0`` holds on every finite pair.

    The equations on S are inconsistent when S contains a cycle whose
    alternating cost sum is nonzero, so S is kept a spanning forest: each
    round keeps the heaviest pairs (forced entries first) that close no cycle.
    Returns ``(H, u, v)`` or ``None`` if no consistent active set was found.
    """
    mask = np.isfinite(L)
    Lf = np.where(mask, L, 0.0)
    n0, n1 = len(a), len(b)
    slack = np.where(mask, Lf - phi[:, None] - psi[None, :], np.inf)
    S = mask & (slack < 40 * eps)
    for i in range(n0):
        if not S[i].any():
            S[i, np.argmin(slack[i])] = True
    for j in range(n1):
        if not S[:, j].any():
            S[np.argmin(slack[:, j]), j] = True
    u, v = -phi.copy(), -psi.copy()
    Hcur = np.array(H0, dtype=float)
    scale = a.sum() + b.sum()
    forced = np.zeros_like(S)
    for _ in range(max_rounds):
        S = _spanning_forest(S, np.where(forced, np.inf, Hcur))
        ii, jj = np.nonzero(S)
        m = len(ii)
        fresh = Hcur[ii, jj] <= 0
        Hcur[ii[fresh], jj[fresh]] = 1e-6 * np.minimum(a[ii[fresh]], b[jj[fresh]])
        x = np.concatenate([Hcur[ii, jj], u, v])
        n = m + n0 + n1
        J = np.zeros((n, n))
        J[np.arange(m), m + ii] = 1.0
        J[np.arange(m), m + n0 + jj] = 1.0
        J[m + ii, np.arange(m)] = 1.0
        J[m + n0 + jj, np.arange(m)] = 1.0
        res = np.inf
        for _ in range(max_newton):
            h, uu, vv = x[:m], x[m:m + n0], x[m + n0:]
            ea, eb = a * np.exp(uu), b * np.exp(vv)
            F = np.concatenate([uu[ii] + vv[jj] + Lf[ii, jj],
                                np.bincount(ii, h, n0) - ea,
                                np.bincount(jj, h, n1) - eb])
            new_res = np.max(np.abs(F))
            if new_res <= 1e-15 * scale or new_res >= res:
                res = min(res, new_res)
                break
            res = new_res
            J[m + np.arange(n0), m + np.arange(n0)] = -ea
            J[m + n0 + np.arange(n1), m + n0 + np.arange(n1)] = -eb
            x = x - np.linalg.lstsq(J, F, rcond=None)[0]
        h, u, v = x[:m], x[m:m + n0], x[m + n0:]
        if not np.all(np.isfinite(x)) or res > 1e-10 * scale:
            return None
        neg = h < -1e-14 * scale
        viol = mask & ~S & (u[:, None] + v[None, :] + Lf < -1e-13)
        if not neg.any() and not viol.any():
            H = np.zeros((n0, n1))
            H[ii, jj] = np.maximum(h, 0.0)
            return H, u, v
        Hcur[ii, jj] = np.maximum(h, 0.0)
        S[ii[neg], jj[neg]] = False
        S |= viol
        forced = viol
    return None


def _spanning_forest(S, weight):
    """Heaviest subset of the bipartite edge set S without cycles (Kruskal)."""
    n0, n1 = S.shape
    parent = list(range(n0 + n1))

    def root(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    ii, jj = np.nonzero(S)
    order = np.argsort(-weight[ii, jj], kind="stable")
    out = np.zeros_like(S)
    for k in order:
        ri, rj = root(ii[k]), root(n0 + jj[k])
        if ri != rj:
            parent[ri] = rj
            out[ii[k], jj[k]] = True
    return out


def _feasible_lower(dual, phi, psi):
    excess = np.where(dual.mask, phi[:, None] + psi[None, :] - dual.Lf, -np.inf).max(axis=1)
    phi_f = phi - np.maximum(excess, 0.0)
    a, b = dual.a, dual.b
    return float(np.sum(a * -np.expm1(-phi_f)) + np.sum(b * -np.expm1(-psi)))


def _primal(a, b, L, H):
    mask = np.isfinite(L)
    e0, e1 = H.sum(axis=1), H.sum(axis=0)
    return float(np.sum(a * entropy_F(e0 / a)) + np.sum(b * entropy_F(e1 / b))
                 + np.sum(np.where(mask, L, 0.0) * H))


def solve_let(problem, tol=1e-8, eps_min=1e-7, sinkhorn_eps=(1.0, 0.3, 0.1), eps_factor=10.0,
              max_newton=60, polish=True):
    """Minimise the LET functional.

    Parameters
    ----------
    problem : LetProblem
    tol : float
        Required width of the certified bracket ``[lower, upper]``.
    eps_min : float
        Smallest regularisation level of the continuation.
    polish : bool
        Finish with the exact active-set solve (off only for diagnostics).

    Raises
    ------
    ConvergenceError
        If the bracket is wider than ``tol`` after the continuation.
    """
    if not tol > 0:
        raise InputError("tol must be positive")
    mu0p, mu0pp, mu1p, mu1pp = reduced_couple(problem)
    keep0 = problem.finite.any(axis=1) if problem.finite.size else np.zeros(len(problem.mu0), bool)
    keep1 = problem.finite.any(axis=0) if problem.finite.size else np.zeros(len(problem.mu1), bool)
    n0, n1 = len(problem.mu0), len(problem.mu1)
    plan = np.zeros((n0, n1))
    sigma0, sigma1 = np.zeros(n0), np.zeros(n1)
    far = mu0pp.mass + mu1pp.mass
    diag = {"far_mass": far, "levels": [], "eps": None}

    if not keep0.any():
        diag.update(lower=far, upper=far, raw_value=far, extrapolated=far, gap=0.0, eps=0.0)
        return LetSolution(problem, plan, sigma0, sigma1, far, diag)

    a, b = mu0p.weights, mu1p.weights
    L = problem.L[np.ix_(keep0, keep1)]
    dual = _Dual(a, b, L)
    phi, psi = np.zeros(len(a)), np.zeros(len(b))
    # warm start only: Newton takes over from here
    for eps in sinkhorn_eps:
        phi, psi = dual.sinkhorn(phi, psi, eps, iters=100, tol=1e-6)
    x = np.concatenate([phi, psi])
    eps = sinkhorn_eps[-1]
    levels = []
    while True:
        # a few log-domain sweeps re-balance the potentials for the new eps
        x = np.concatenate(dual.sinkhorn(x[: len(a)], x[len(a):], eps, iters=10))
        x, its, ok = dual.newton(x, eps, max_iter=max_newton)
        phi, psi = x[: len(a)], x[len(a):]
        H = dual.plan(phi, psi, eps)
        H[H < PRUNE * max(1.0, H.max())] = 0.0
        levels.append({"eps": eps, "newton_iters": its, "converged": ok,
                       "primal": _primal(a, b, L, H), "dual": _feasible_lower(dual, phi, psi)})
        if eps <= eps_min * (1 + 1e-9):
            break
        eps = max(eps / eps_factor, eps_min)

    raw = levels[-1]["primal"]
    if len(levels) >= 2:
        ratio = levels[-2]["eps"] / levels[-1]["eps"]
        ext = raw + (raw - levels[-2]["primal"]) / (ratio - 1.0)
    else:
        ext = raw
    lower, upper = levels[-1]["dual"], levels[-1]["primal"]
    polished = _kkt_polish(a, b, L, phi, psi, eps, H) if polish else None
    if polished is not None:
        Hp, u, v = polished
        up_p = _primal(a, b, L, Hp)
        lo_p = _feasible_lower(dual, -u, -v)
        if up_p - lo_p <= upper - lower:
            H, lower, upper = Hp, lo_p, up_p
    value_red = float(min(max(ext, lower), upper))
    gap = upper - lower
    diag.update(levels=levels, eps=eps, raw_value=raw + far, extrapolated=ext + far,
                lower=lower + far, upper=upper + far, gap=gap, polished=polished is not None)

    plan[np.ix_(keep0, keep1)] = H
    s0 = np.zeros(n0)
    s1 = np.zeros(n1)
    s0[keep0] = H.sum(axis=1) / a
    s1[keep1] = H.sum(axis=0) / b
    sol = LetSolution(problem, plan, s0, s1, value_red + far, diag)
    if not gap <= tol or not np.isfinite(gap):
        raise ConvergenceError(f"LET bracket width {gap:.3e} exceeds tol {tol:.1e}", partial=sol)
    return sol


def solve(mu0, mu1, delta, tol=1e-8, **kw):
    return solve_let(LetProblem(mu0, mu1, delta), tol=tol, **kw)


# -- checks -----------------------------------------------------------------

@dataclass(frozen=True)
class OptimalityReport:
    far_sigma: float
    inequality: float
    equality: float
    value_identity: float
    infinite_plan: float
    ok: bool


def verify_optimality(sol, tol=1e-6, support_tol=1e-12):
    """Worst residuals of the optimality conditions.

    * ``far_sigma``: largest ``sigma`` on atoms outside transport range (must be 0);
    * ``inequality``: largest ``cos^2(delta d) - sigma0 sigma1`` over pairs of
      atoms within range (the ``0 * inf = 1`` convention makes other pairs trivial);
    * ``equality``: largest ``|sigma0 sigma1 - cos^2|`` on the support of H;
    * ``value_identity``: ``|value - (m0 + m1 - 2 H(total))|``.
    """
    p = sol.problem
    F = p.finite
    keep0 = F.any(axis=1) if F.size else np.zeros(len(p.mu0), bool)
    keep1 = F.any(axis=0) if F.size else np.zeros(len(p.mu1), bool)
    far = max(np.max(np.abs(sol.sigma0[~keep0]), initial=0.0), np.max(np.abs(sol.sigma1[~keep1]), initial=0.0))
    prod = np.outer(sol.sigma0, sol.sigma1)
    c2 = p.cos2
    rng = F & keep0[:, None] & keep1[None, :]
    ineq = float(np.max(np.where(rng, c2 - prod, -np.inf), initial=0.0)) if F.size else 0.0
    supp = sol.plan > support_tol * max(1.0, sol.plan.max(initial=0.0))
    eq = float(np.max(np.abs(prod - c2)[supp], initial=0.0))
    ident = abs(sol.value - (p.mu0.mass + p.mu1.mass - 2 * sol.total))
    inf_plan = float(np.max(np.where(F, 0.0, sol.plan), initial=0.0)) if F.size else 0.0
    ok = far == 0.0 and ineq <= tol and eq <= tol and ident <= 10 * tol and inf_plan == 0.0
    return OptimalityReport(float(far), max(ineq, 0.0), eq, float(ident), inf_plan, bool(ok))


@dataclass(frozen=True)
class PlanMassReport:
    total: float
    total_bound: float
    subset: float
    subset_bound: float
    image_bound: float

    @property
    def total_slack(self):
        return self.total_bound - self.total

    @property
    def subset_slack(self):
        return self.subset_bound - self.subset

    @property
    def image_slack(self):
        return self.image_bound - self.subset


def enlargement(problem, subset, b):
    """Atoms of mu1 within distance ``b`` of some atom of ``subset`` (closed enlargement)."""
    subset = np.asarray(subset, dtype=int)
    if len(subset) == 0:
        return np.zeros(len(problem.mu1), bool)
    return (problem.dist01[subset] <= b + 1e-12).any(axis=0)


def plan_mass_bounds(sol, subset=()):
    """Plan-mass bounds in terms of the reduced couple.

    ``subset`` indexes atoms of mu0. Returns the plan mass of ``A x X`` with
    the bound ``sqrt(mu0'(A) mu1'(A_b))``, ``b = pi / (2 delta)``, and the
    sharper ``sqrt(mu0'(A) mu1'(T(A)))`` where ``T(A)`` are the atoms of mu1
    receiving mass from A.
    """
    p = sol.problem
    F = p.finite
    keep0 = F.any(axis=1) if F.size else np.zeros(len(p.mu0), bool)
    keep1 = F.any(axis=0) if F.size else np.zeros(len(p.mu1), bool)
    a = np.where(keep0, p.mu0.weights, 0.0)
    bw = np.where(keep1, p.mu1.weights, 0.0)
    total = sol.total
    total_bound = float(np.sqrt(a.sum() * bw.sum()))
    A = np.asarray(subset, dtype=int)
    sub = float(sol.plan[A].sum()) if len(A) else 0.0
    Ab = enlargement(p, A, np.pi / (2 * p.delta))
    sub_bound = float(np.sqrt(a[A].sum() * bw[Ab].sum())) if len(A) else 0.0
    image = (sol.plan[A] > 0).any(axis=0) if len(A) else np.zeros(len(p.mu1), bool)
    img_bound = float(np.sqrt(a[A].sum() * bw[image].sum())) if len(A) else 0.0
    return PlanMassReport(total, total_bound, sub, sub_bound, img_bound)
