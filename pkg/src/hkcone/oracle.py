"""Independent reference solvers used to cross-check the main solver on tiny instances.

``let_oracle`` minimises the LET functional directly over plans by projected
gradient descent with an Armijo line search, from several starting plans.
``w2_oracle`` computes the squared quadratic Wasserstein distance of two
equal-mass measures by linear programming.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

HALF_PI = np.pi / 2


def _let_cost(delta, dist):
    x = delta * np.asarray(dist, float)
    out = np.full(x.shape, np.inf)
    ok = x < HALF_PI
    out[ok] = -2.0 * np.log(np.cos(x[ok]))
    return out


def _objective(h, a, b, Lf, idx):
    H = np.zeros(Lf.shape)
    H[idx] = h
    e0, e1 = H.sum(axis=1), H.sum(axis=0)

    def ent(e, m):
        s = e / m
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(s > 0, s * np.log(np.where(s > 0, s, 1.0)) - s + 1.0, 1.0)
        return float(np.sum(m * v))

    return ent(e0, a) + ent(e1, b) + float(np.sum(Lf[idx] * h)), e0, e1


def let_oracle(a, b, dist, delta, starts=3, max_iter=5000, gtol=1e-9, seed=0):
    """Minimum of the LET functional by (diagonally scaled) projected gradient over finite-cost pairs.

    Returns ``(value, plan)``.
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    L = _let_cost(delta, dist)
    idx = np.nonzero(np.isfinite(L))
    Lf = np.where(np.isfinite(L), L, 0.0)
    if len(idx[0]) == 0:
        return float(a.sum() + b.sum()), np.zeros(L.shape)
    rng = np.random.default_rng(seed)
    best_val, best_h = np.inf, None
    for s in range(starts):
        if s == 0:
            h = np.sqrt(a[idx[0]] * b[idx[1]]) * np.exp(-L[idx] / 2)
        else:
            h = rng.uniform(0.05, 1.0, len(idx[0])) * np.sqrt(a[idx[0]] * b[idx[1]])
        f, e0, e1 = _objective(h, a, b, Lf, idx)
        step, stall = 1.0, 0
        for _ in range(max_iter):
            with np.errstate(divide="ignore"):
                g = np.log(e0[idx[0]] / a[idx[0]]) + np.log(e1[idx[1]] / b[idx[1]]) + L[idx]
            g = np.where(np.isfinite(g), g, -1e3)
            # projected-gradient stationarity measure
            pg = np.where(h > 0, g, np.minimum(g, 0.0))
            if np.max(np.abs(pg)) < gtol:
                break
            # diagonal scaling by the entropy curvature 1/eta0 + 1/eta1
            with np.errstate(divide="ignore"):
                D = 1.0 / (1.0 / e0[idx[0]] + 1.0 / e1[idx[1]])
            D = np.where(np.isfinite(D) & (D > 0), D, 1.0)
            step = min(step * 2.0, 1e3)
            while True:
                hn = np.maximum(h - step * D * g, 0.0)
                fn, e0n, e1n = _objective(hn, a, b, Lf, idx)
                if fn <= f - 1e-4 * float(g @ (h - hn)) or step < 1e-18:
                    break
                step *= 0.5
            if step < 1e-18:
                break
            stall = stall + 1 if f - fn <= 1e-15 * (1.0 + abs(f)) else 0
            h, f, e0, e1 = hn, fn, e0n, e1n
            if stall >= 20:
                break
        if f < best_val:
            best_val, best_h = f, h
    H = np.zeros(L.shape)
    H[idx] = best_h
    return float(best_val), H


def w2_oracle(a, b, dist):
    """Squared W2 distance between equal-mass discrete measures by linear programming."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    n0, n1 = len(a), len(b)
    c = (np.asarray(dist, float) ** 2).reshape(-1)
    A_eq = np.zeros((n0 + n1, n0 * n1))
    for i in range(n0):
        A_eq[i, i * n1:(i + 1) * n1] = 1.0
    for j in range(n1):
        A_eq[n0 + j, j::n1] = 1.0
    res = linprog(c, A_eq=A_eq, b_eq=np.concatenate([a, b]), bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError(res.message)
    return float(res.fun)
