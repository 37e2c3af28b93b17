"""Command-line front end.

Subcommands::

    hkcone hk --input problem.json [--delta D] [--tol T] [--out FILE]
    hkcone shk --input problem.json
    hkcone geodesic --input problem.json [--grid N] [--format csv|json]
    hkcone check {scaling,metric,optimality,lac,semiconcavity,doubling} [--input FILE] [--seed S]

Exit codes: 0 success, 1 input error, 2 solver non-convergence, 3 a checked
property failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import angles, hk_space, instances, measure_sets, semiconcavity
from .errors import ConvergenceError, GeometryError, InputError
from .let_solver import DiscreteMeasure, LetProblem, plan_mass_bounds, solve_let, verify_optimality
from .metric_base import BaseGeodesic, MetricSpace, metric_violations

EXIT_OK, EXIT_INPUT, EXIT_CONVERGENCE, EXIT_PROPERTY = 0, 1, 2, 3
SUITES = ("scaling", "metric", "optimality", "lac", "semiconcavity", "doubling")

# property tolerances used by the check suites
SCALING_TOL = 1e-4
OPTIMALITY_TOL = 1e-4
K_FLAT_TOL = 1e-9


@dataclass(frozen=True)
class RunConfig:
    command: str
    suite: str | None = None
    input: str | None = None
    delta: float | None = None
    tol: float = 1e-8
    grid: int = 11
    seed: int = 0
    count: int = 10
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError("--tol must be positive")
        if self.grid < 3:
            raise InputError("--grid must be at least 3")
        if self.count < 1:
            raise InputError("--count must be positive")


# -- io ---------------------------------------------------------------------

def _clean(obj):
    """Make ``obj`` strict-JSON serialisable (numpy scalars, arrays, non-finite floats)."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if np.isfinite(f) else None
    return obj


def _read_json(path):
    if path is None:
        raise InputError("--input is required for this command")
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"input file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from None


def load_problem(desc, delta=None):
    """Build a :class:`LetProblem` from a problem descriptor (``space``, ``mu0``, ``mu1``, ``delta``)."""
    try:
        space = MetricSpace.from_json(desc["space"])
        mu0 = DiscreteMeasure.from_json(desc["mu0"], space)
        mu1 = DiscreteMeasure.from_json(desc["mu1"], space)
        d = float(delta if delta is not None else desc.get("delta", 1.0))
    except (KeyError, TypeError) as exc:
        raise InputError(f"incomplete problem description: {exc}") from None
    return LetProblem(mu0, mu1, d)


def _emit(cfg, payload, out):
    payload = dict(payload)
    payload["seed"] = cfg.seed
    payload["command"] = cfg.command if cfg.suite is None else f"{cfg.command} {cfg.suite}"
    text = json.dumps(_clean(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"
    _write(cfg, text, out)


def _write(cfg, text, out):
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)


# -- commands ---------------------------------------------------------------

def cmd_hk(cfg, out):
    p = load_problem(_read_json(cfg.input), cfg.delta)
    sol = solve_let(p, tol=cfg.tol)
    payload = {"hk": float(np.sqrt(max(sol.value, 0.0))), **sol.to_json()}
    if p.mu0.is_probability() and p.mu1.is_probability():
        payload["shk"] = hk_space.shk_from_hk2(sol.value)
    _emit(cfg, payload, out)
    return EXIT_OK


def cmd_shk(cfg, out):
    p = load_problem(_read_json(cfg.input), cfg.delta)
    for mu in (p.mu0, p.mu1):
        if not mu.is_probability():
            raise InputError("shk needs probability measures")
    sol = solve_let(p, tol=cfg.tol)
    _emit(cfg, {"shk": hk_space.shk_from_hk2(sol.value), **sol.to_json()}, out)
    return EXIT_OK


def cmd_geodesic(cfg, out):
    p = load_problem(_read_json(cfg.input), cfg.delta)
    sol = solve_let(p, tol=cfg.tol)
    g = hk_space.geodesic_from_solution(sol)
    ts = np.linspace(0.0, 1.0, cfg.grid)
    if cfg.format == "csv":
        buf = io.StringIO()
        buf.write(f"# seed={cfg.seed} delta={p.delta!r} hk2={g.hk2!r}\n")
        rows = g.table(ts)
        width = max((len(r) for r in rows), default=4) - 3
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "atom"] + [f"x{k}" for k in range(width)] + ["mass"])
        for r in rows:
            w.writerow([repr(float(v)) if k != 1 else int(v) for k, v in enumerate(r)])
        _write(cfg, buf.getvalue(), out)
        return EXIT_OK
    masses = [g.at(float(t)).mass for t in ts]
    law = [g.mass_law(float(t)) for t in ts]
    _emit(cfg, {"t": ts, "mass": masses, "mass_law": law,
                "mass_residual": float(np.max(np.abs(np.subtract(masses, law)))),
                "hk2": g.hk2, "rays": len(g.rays)}, out)
    return EXIT_OK


# -- check suites -----------------------------------------------------------

def _check_scaling(cfg, rng):
    rows = []
    for _ in range(cfg.count):
        p = instances.random_problem(rng, n=6, k0=3, k1=3)
        r0, r1 = rng.uniform(0.1, 10.0, 2)
        chk = hk_space.scaling_check(p.mu0, p.mu1, r0, r1, p.delta, cfg.tol)
        rows.append({"r0": r0, "r1": r1, "delta": p.delta, "residual": chk.residual})
    worst = max(abs(r["residual"]) for r in rows)
    return worst <= SCALING_TOL, {"instances": rows, "max_residual": worst, "threshold": SCALING_TOL}


def _check_metric(cfg, rng):
    desc = _read_json(cfg.input)
    desc = desc.get("space", desc)
    try:
        space = MetricSpace.from_json(desc, validate=False)
    except (KeyError, TypeError) as exc:
        raise InputError(f"incomplete space description: {exc}") from None
    rep = metric_violations(space.dist)
    return bool(rep["ok"]), {"violations": rep, "points": len(space)}


def _check_optimality(cfg, rng):
    if cfg.input:
        probs = [load_problem(_read_json(cfg.input), cfg.delta)]
    else:
        probs = [instances.random_problem(rng) for _ in range(cfg.count)]
    rows, ok = [], True
    for p in probs:
        sol = solve_let(p, tol=cfg.tol)
        rep = verify_optimality(sol, tol=OPTIMALITY_TOL)
        pm = plan_mass_bounds(sol, np.arange(len(p.mu0)))
        good = rep.ok and pm.total_slack >= -1e-8 and pm.subset_slack >= -1e-8
        ok &= good
        rows.append({"value": sol.value, "far_sigma": rep.far_sigma, "inequality": rep.inequality,
                     "equality": rep.equality, "value_identity": rep.value_identity,
                     "total_slack": pm.total_slack, "ok": good})
    return ok, {"instances": rows}


def _lac_fixture(desc):
    kind = desc.get("kind", "euclidean")
    v = np.asarray(desc["vertex"], float)
    return kind, [BaseGeodesic(kind, v, np.asarray(e, float)) for e in desc["endpoints"]]


def _check_lac(cfg, rng):
    if cfg.input:
        kind, geos = _lac_fixture(_read_json(cfg.input))
    else:
        # three planar rays at mutual angle 2 pi / 3: the boundary case
        th = 2 * np.pi * np.arange(3) / 3
        kind = "euclidean"
        geos = [BaseGeodesic(kind, np.zeros(2), np.array([np.cos(a), np.sin(a)])) for a in th]
    res = angles.mlac_check(kind, geos, tol=1e-6)
    rep = {"method": res.method, "min_form": res.min_form, "angles": res.angles,
           "certificate": res.certificate if isinstance(res.certificate, str) else list(res.certificate)}
    return res.satisfied, rep


def _check_semiconcavity(cfg, rng):
    rows = []
    for _ in range(cfg.count):
        x0, x1, x2 = rng.normal(size=(3, 2))
        g = BaseGeodesic("euclidean", x0, x1)
        r = semiconcavity.estimate_K("euclidean", g, x2, "f2", n=max(cfg.grid, 33))
        rows.append({"K": r.K, "K_normalized": r.K_normalized})
    worst = max(abs(r["K_normalized"]) for r in rows)
    return worst <= K_FLAT_TOL, {"instances": rows, "max_abs_K_normalized": worst,
                                 "threshold": K_FLAT_TOL}


def _check_doubling(cfg, rng):
    if cfg.input:
        desc = _read_json(cfg.input)
        try:
            space = MetricSpace.from_json(desc["space"])
            if "reference" in desc:
                L = DiscreteMeasure.from_json(desc["reference"], space)
            else:
                L = DiscreteMeasure(space, np.arange(len(space)), np.ones(len(space)))
            scales = desc.get("scales", [[0.1, 0.2]])
        except (KeyError, TypeError) as exc:
            raise InputError(f"incomplete doubling description: {exc}") from None
    else:
        space, L = instances.uniform_grid(41)
        scales = [[0.05, 0.1], [0.1, 0.2], [0.1, 0.4]]
    rep = measure_sets.doubling_constants(space, L, scales)
    return rep.ok, rep.to_json()


CHECKS = {
    "scaling": _check_scaling,
    "metric": _check_metric,
    "optimality": _check_optimality,
    "lac": _check_lac,
    "semiconcavity": _check_semiconcavity,
    "doubling": _check_doubling,
}


def cmd_check(cfg, out):
    rng = np.random.default_rng(cfg.seed)
    ok, report = CHECKS[cfg.suite](cfg, rng)
    _emit(cfg, {"suite": cfg.suite, "pass": bool(ok), "report": report}, out)
    return EXIT_OK if ok else EXIT_PROPERTY


COMMANDS = {"hk": cmd_hk, "shk": cmd_shk, "geodesic": cmd_geodesic, "check": cmd_check}


# -- entry point ------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="problem or fixture JSON")
    common.add_argument("--delta", type=float, help="override the HK length scale")
    common.add_argument("--tol", type=float, default=1e-8, help="solver bracket tolerance")
    common.add_argument("--grid", type=int, default=11, help="number of time samples")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--count", type=int, default=10, help="random instances per check")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="hkcone", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("hk", parents=[common], help="HK distance and optimal plan")
    sub.add_parser("shk", parents=[common], help="spherical HK distance")
    sub.add_parser("geodesic", parents=[common], help="geodesic samples (CSV) or mass summary")
    chk = sub.add_parser("check", parents=[common], help="run a property suite")
    chk.add_argument("suite", choices=SUITES)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, getattr(args, "suite", None), args.input, args.delta, args.tol,
                        args.grid, args.seed, args.count, args.out, args.format)
        return COMMANDS[cfg.command](cfg, out)
    except (InputError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
