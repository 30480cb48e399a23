"""Local objective functions and composite regularizers.

Two smooth local objectives are supported:

* least squares, f(x) = 1/2 * sum_j (a_j^T x - b_j)^2
* logistic loss, f(x) = sum_j [ln(1 + exp(-w_j^T x)) + (1 - y_j) w_j^T x]
  with labels y_j in {0, 1}

and three regularizers: zero, gamma * ||x||_1, and gamma * ||x||^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LEAST_SQUARES = "least_squares"
LOGISTIC = "logistic"

_OBJECTIVE_KINDS = (LEAST_SQUARES, LOGISTIC)


def _sigmoid(u: np.ndarray) -> np.ndarray:
    """Branch-stable logistic function, safe for |u| well beyond 30."""
    out = np.empty_like(u, dtype=float)
    pos = u >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-u[pos]))
    eu = np.exp(u[~pos])
    out[~pos] = eu / (1.0 + eu)
    return out


@dataclass
class LocalObjective:
    """Smooth local cost of a single agent over its data points.

    Parameters
    ----------
    kind : str
        "least_squares" or "logistic".
    features : ndarray, shape (n_points, d)
        Row j holds a_j (least squares) or w_j (logistic).
    targets : ndarray, shape (n_points,)
        b_j values, or labels in {0, 1} for logistic.
    """

    kind: str
    features: np.ndarray
    targets: np.ndarray
    _gram: np.ndarray = field(init=False, repr=False)
    _atb: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in _OBJECTIVE_KINDS:
            raise ValueError(f"unknown objective kind {self.kind!r}")
        self.features = np.atleast_2d(np.asarray(self.features, dtype=float))
        self.targets = np.asarray(self.targets, dtype=float).ravel()
        if self.features.shape[0] != self.targets.shape[0]:
            raise ValueError("feature/target row counts differ")
        if self.kind == LOGISTIC and not np.all(np.isin(self.targets, (0.0, 1.0))):
            raise ValueError("logistic labels must be in {0, 1}")
        if self.kind == LEAST_SQUARES:
            self._gram = self.features.T @ self.features
            self._atb = self.features.T @ self.targets
        else:
            self._gram = np.empty(0)
            self._atb = np.empty(0)

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def value(self, x: np.ndarray) -> float:
        if self.kind == LEAST_SQUARES:
            r = self.features @ x - self.targets
            return 0.5 * float(r @ r)
        u = self.features @ x
        # ln(1 + e^{-u}) computed as logaddexp(0, -u) to avoid overflow
        return float(np.sum(np.logaddexp(0.0, -u) + (1.0 - self.targets) * u))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        if self.kind == LEAST_SQUARES:
            return self._gram @ x - self._atb
        u = self.features @ x
        return self.features.T @ (_sigmoid(u) - self.targets)

    def hessian(self, x: np.ndarray) -> np.ndarray:
        if self.kind == LEAST_SQUARES:
            return self._gram.copy()
        s = _sigmoid(self.features @ x)
        return (self.features * (s * (1.0 - s))[:, None]).T @ self.features

    def evaluate(self, x: np.ndarray):
        """Value, gradient, and Hessian at x in one call."""
        return self.value(x), self.gradient(x), self.hessian(x)


@dataclass(frozen=True)
class SmoothnessConstants:
    """Curvature bounds: m_f I <= Hessian <= M_f I, Hessian L_f-Lipschitz."""

    m_f: float
    M_f: float
    L_f: float


def smoothness_constants(obj: LocalObjective) -> SmoothnessConstants:
    """Strong convexity / smoothness / Hessian-Lipschitz constants.

    Least squares: extreme eigenvalues of the Gram matrix, L_f = 0.
    Logistic: the Hessian is bounded above by a quarter of the feature
    Gram, and its Lipschitz constant by the peak of the sigmoid's second
    derivative (1 / (6 sqrt 3)) times the cubed feature norms.
    """
    if obj.features.shape[0] == 0:
        raise ValueError("objective has no data")
    if obj.kind == LEAST_SQUARES:
        eig = np.linalg.eigvalsh(obj._gram)
        return SmoothnessConstants(m_f=float(max(eig[0], 0.0)), M_f=float(eig[-1]), L_f=0.0)
    eig = np.linalg.eigvalsh(obj.features.T @ obj.features)
    norms = np.linalg.norm(obj.features, axis=1)
    return SmoothnessConstants(
        m_f=0.0,
        M_f=0.25 * float(eig[-1]),
        L_f=float(np.sum(norms**3)) / (6.0 * np.sqrt(3.0)),
    )


def aggregate_smoothness(objectives) -> SmoothnessConstants:
    """Network-wide bounds: the tightest constants valid for every agent."""
    per_agent = [smoothness_constants(obj) for obj in objectives]
    return SmoothnessConstants(
        m_f=min(c.m_f for c in per_agent),
        M_f=max(c.M_f for c in per_agent),
        L_f=max(c.L_f for c in per_agent),
    )


ZERO = "zero"
L1 = "l1"
SQUARED_L2 = "squared_l2"

_REGULARIZER_KINDS = (ZERO, L1, SQUARED_L2)


@dataclass(frozen=True)
class Regularizer:
    """Convex regularizer with closed-form proximal map."""

    kind: str = ZERO
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in _REGULARIZER_KINDS:
            raise ValueError(f"unknown regularizer kind {self.kind!r}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")

    def value(self, x: np.ndarray) -> float:
        if self.kind == ZERO:
            return 0.0
        if self.kind == L1:
            return self.gamma * float(np.sum(np.abs(x)))
        return self.gamma * float(x @ x)


def prox(g: Regularizer, mu: float, v: np.ndarray) -> np.ndarray:
    """Proximal map argmin_theta { g(theta) + mu/2 ||theta - v||^2 }.

    Soft threshold at gamma/mu for the l1 norm, shrinkage by
    mu/(mu + 2 gamma) for the squared l2 norm, identity for zero.
    """
    if mu <= 0:
        raise ValueError(f"prox weight must be positive, got {mu}")
    v = np.asarray(v, dtype=float)
    if g.kind == ZERO:
        return v.copy()
    if g.kind == L1:
        return np.sign(v) * np.maximum(np.abs(v) - g.gamma / mu, 0.0)
    return v * (mu / (mu + 2.0 * g.gamma))


def subgradient_membership(g: Regularizer, theta: np.ndarray, lam: np.ndarray, tol: float) -> bool:
    """Whether lam lies in the subdifferential of g at theta, within tol."""
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    theta = np.asarray(theta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if g.kind == ZERO:
        return bool(np.linalg.norm(lam) <= tol)
    if g.kind == L1:
        active = theta != 0.0
        if np.any(np.abs(lam[active] - g.gamma * np.sign(theta[active])) > tol):
            return False
        return bool(np.all(np.abs(lam[~active]) <= g.gamma + tol))
    return bool(np.linalg.norm(lam - 2.0 * g.gamma * theta) <= tol)
