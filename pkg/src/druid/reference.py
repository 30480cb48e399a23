"""Centralized reference solution for error metrics.

Solves min_x sum_i f_i(x) + g(x) by proximal gradient descent with the
fixed step 1/L, L being an upper curvature bound of the smooth part, with
Nesterov acceleration and function-value restarts.  Convergence is
declared on the prox-gradient fixed-point residual, which vanishes
exactly at minimizers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .network import ConsensusProblem
from .problems import LEAST_SQUARES, prox


@dataclass(frozen=True)
class ReferenceSolution:
    x_star: np.ndarray
    cost_star: float
    residual: float
    iterations: int


def total_curvature_bound(problem: ConsensusProblem) -> float:
    """Largest eigenvalue of an upper bound on the summed Hessians."""
    d = problem.d
    bound = np.zeros((d, d))
    for obj in problem.objectives:
        if obj.kind == LEAST_SQUARES:
            bound += obj._gram
        else:
            bound += 0.25 * (obj.features.T @ obj.features)
    return float(np.linalg.eigvalsh(bound)[-1])


def fixed_point_residual(problem: ConsensusProblem, x: np.ndarray, lip: float) -> float:
    """Distance from x to one prox-gradient step of itself."""
    step = prox(problem.regularizer, lip, x - problem.total_gradient(x) / lip)
    return float(np.linalg.norm(x - step))


def centralized_reference(problem: ConsensusProblem, tol: float = 1e-12,
                          max_iter: int = 1_000_000, accelerated: bool = True) -> ReferenceSolution:
    """Minimize the composite cost to the given fixed-point residual."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    lip = total_curvature_bound(problem)
    if lip <= 0:
        raise ConvergenceError("smooth part has no curvature bound")
    g = problem.regularizer
    x = np.zeros(problem.d)
    y = x.copy()
    t_momentum = 1.0
    for k in range(1, max_iter + 1):
        x_new = prox(g, lip, y - problem.total_gradient(y) / lip)
        if not accelerated or float((y - x_new) @ (x_new - x)) > 0.0:
            # momentum points against the step: drop it and restart
            t_momentum = 1.0
            y = x_new
        else:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_momentum**2))
            y = x_new + ((t_momentum - 1.0) / t_next) * (x_new - x)
            t_momentum = t_next
        x = x_new
        residual = fixed_point_residual(problem, x, lip)
        if residual <= tol:
            return ReferenceSolution(
                x_star=x, cost_star=problem.total_value(x), residual=residual, iterations=k
            )
    raise ConvergenceError(
        f"reference solver did not reach {tol} in {max_iter} iterations",
        residual=fixed_point_residual(problem, x, lip),
    )
