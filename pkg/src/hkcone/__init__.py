"""Cone geometry and Hellinger-Kantorovich distances on finitely supported measures."""
from .errors import ConvergenceError, GeometryError, HKError, InputError
from .metric_base import BaseGeodesic, MetricSpace
from .cone import Cone, ConeGeodesic, ConePoint
from .let_solver import DiscreteMeasure, LetProblem, LetSolution, solve_let

__all__ = [
    "BaseGeodesic", "Cone", "ConeGeodesic", "ConePoint", "ConvergenceError",
    "DiscreteMeasure", "GeometryError", "HKError", "InputError", "LetProblem",
    "LetSolution", "MetricSpace", "solve_let",
]
