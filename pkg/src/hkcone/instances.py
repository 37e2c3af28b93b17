"""Seeded random problem generators shared by the CLI and the test suites."""
from __future__ import annotations

import numpy as np

from .let_solver import DiscreteMeasure, LetProblem
from .metric_base import MetricSpace


def random_space(rng, kind="euclidean", n=8, dim=2, scale=1.0):
    if kind == "euclidean":
        return MetricSpace.euclidean(rng.uniform(0.0, scale, (n, dim)))
    if kind == "circle":
        return MetricSpace.circle(rng.uniform(0.0, 2 * np.pi, n))
    if kind == "sphere":
        return MetricSpace.sphere(rng.normal(size=(n, 3)))
    raise ValueError(f"no random generator for kind {kind!r}")


def random_measure(rng, space, k=None, low=0.2, high=2.0):
    """Measure on ``k`` distinct random points of ``space`` with weights in ``[low, high)``."""
    n = len(space)
    k = n if k is None else min(k, n)
    idx = np.sort(rng.choice(n, size=k, replace=False))
    return DiscreteMeasure(space, idx, rng.uniform(low, high, k))


def random_problem(rng, kind="euclidean", n=8, k0=4, k1=4, delta=None, scale=1.0):
    """Random LET problem; ``delta`` defaults to a draw from ``[0.5, 2]``."""
    space = random_space(rng, kind, n, scale=scale)
    mu0 = random_measure(rng, space, k0)
    mu1 = random_measure(rng, space, k1)
    if delta is None:
        delta = float(rng.uniform(0.5, 2.0))
    return LetProblem(mu0, mu1, delta)


def dirac_pair(d, delta, kind="euclidean"):
    """Unit Diracs at distance ``d`` on the real line (or on a circle)."""
    if kind == "circle":
        space = MetricSpace.circle([0.0, d])
    else:
        space = MetricSpace.euclidean([[0.0], [d]])
    return LetProblem(DiscreteMeasure(space, [0], [1.0]), DiscreteMeasure(space, [1], [1.0]), delta)


def uniform_grid(n=21, length=1.0):
    """Uniform grid on ``[0, length]`` with the normalised counting measure."""
    space = MetricSpace.euclidean(np.linspace(0.0, length, n)[:, None])
    return space, DiscreteMeasure(space, np.arange(n), np.full(n, 1.0 / n))


def perturbed(rng, L, rho):
    """Random member of the density class: density drawn from ``[rho, 1/rho]`` w.r.t. ``L``."""
    lo, hi = rho, 1.0 / rho
    dens = rng.uniform(lo, hi, len(L))
    return DiscreteMeasure(L.space, L.support, L.weights * np.clip(dens, lo, hi))
