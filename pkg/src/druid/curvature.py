"""Per-agent curvature models for the primal update.

The approximated Hessian of the augmented Lagrangian is block diagonal;
agent i's block is J_ii plus the constant shift
(mu_z * |N_i| + mu_theta * [i == leader] + epsilon) * I with

* J_ii = 0 for the gradient scheme (the block is a scalar),
* J_ii = local Hessian for the Newton scheme,
* the BFGS scheme tracks the block's inverse directly from
  iterate/gradient difference pairs, so no linear system is solved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .problems import LocalObjective

GRADIENT = "gradient"
NEWTON = "newton"
BFGS = "bfgs"

SCHEMES = (GRADIENT, NEWTON, BFGS)

#: Curvature pairs with q^T s at or below this (relative) level are skipped.
BFGS_SKIP_TOL = 1e-12


@dataclass
class Hyperparams:
    """Algorithm parameters shared by every agent.

    ``psi`` is the BFGS curvature bound; the additive 1/psi regularization
    it controls is applied only when ``bfgs_bounding`` is on, but rate
    formulas use psi whenever the scheme is BFGS.
    """

    mu_z: float
    mu_theta: float
    epsilon: float
    scheme: str = GRADIENT
    leader: int = 0
    psi: float = 1.0
    bfgs_bounding: bool = False

    def __post_init__(self):
        if self.mu_z <= 0 or self.mu_theta <= 0 or self.epsilon <= 0:
            raise ValueError("mu_z, mu_theta, and epsilon must be positive")
        if self.psi <= 0:
            raise ValueError("psi must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.leader < 0:
            raise ValueError("leader index must be nonnegative")


def block_diag_value(hp: Hyperparams, degree: int, is_leader: bool) -> float:
    """Constant diagonal of agent i's curvature block (the whole block
    under the gradient scheme); independent of the iterate."""
    return hp.mu_z * degree + (hp.mu_theta if is_leader else 0.0) + hp.epsilon


def newton_block(obj: LocalObjective, x: np.ndarray, hp: Hyperparams,
                 degree: int, is_leader: bool) -> np.ndarray:
    """Local Hessian plus the constant shift; positive definite by construction."""
    block = obj.hessian(x)
    block[np.diag_indices_from(block)] += block_diag_value(hp, degree, is_leader)
    return block


@dataclass
class CurvatureState:
    """Curvature information owned by one agent.

    ``shift`` is the constant diagonal; ``block`` holds the Newton block
    (refreshed every update), ``inv_estimate`` the BFGS inverse model.
    ``x_prev``/``grad_prev`` are the iterate and local gradient at the
    agent's last completed update.  ``last_pair`` records the most recent
    (s, q, accepted) triple for diagnostics.
    """

    scheme: str
    shift: float
    block: np.ndarray = None
    inv_estimate: np.ndarray = None
    x_prev: np.ndarray = None
    grad_prev: np.ndarray = None
    last_pair: tuple = field(default=None, repr=False)


def init_curvature(scheme: str, d: int, shift: float, grad0: np.ndarray = None) -> CurvatureState:
    """State at the zero initial iterate.

    The BFGS inverse starts at I/shift, the exact inverse of the curvature
    block when the local Hessian vanishes.
    """
    st = CurvatureState(scheme=scheme, shift=shift)
    if scheme == BFGS:
        st.inv_estimate = np.eye(d) / shift
        st.x_prev = np.zeros(d)
        st.grad_prev = np.asarray(grad0, dtype=float).copy()
    return st


def bfgs_pair(state: CurvatureState, x_new: np.ndarray, grad_new: np.ndarray):
    """Iterate/gradient difference pair against the agent's last update.

    The gradient difference is shifted by the constant diagonal so that
    the pair models the full curvature block, not just the local Hessian.
    """
    s = x_new - state.x_prev
    q = grad_new - state.grad_prev + state.shift * s
    return s, q


def bfgs_inverse_update(B: np.ndarray, s: np.ndarray, q: np.ndarray,
                        skip_tol: float = BFGS_SKIP_TOL, psi: float = None) -> np.ndarray:
    """Rank-two secant update of the inverse estimate.

    Returns B unchanged when the pair's curvature q^T s is not safely
    positive (skip rule).  With ``psi`` given, adds I/psi afterwards to
    keep the modeled curvature below psi.
    """
    if not (np.all(np.isfinite(s)) and np.all(np.isfinite(q)) and np.all(np.isfinite(B))):
        raise FloatingPointError("non-finite input to curvature update")
    qs = float(q @ s)
    if qs <= skip_tol * np.linalg.norm(q) * np.linalg.norm(s) or not np.any(s):
        return B
    rho = 1.0 / qs
    V = np.eye(len(s)) - rho * np.outer(s, q)
    out = V @ B @ V.T + rho * np.outer(s, s)
    out = 0.5 * (out + out.T)
    if psi is not None:
        out[np.diag_indices_from(out)] += 1.0 / psi
    return out


def solve_direction(state: CurvatureState, h: np.ndarray) -> np.ndarray:
    """Update direction u with curvature_block @ u = h.

    Scalar division for the gradient scheme, a Cholesky solve for Newton,
    and a plain matrix-vector product for BFGS.
    """
    if state.scheme == GRADIENT:
        return h / state.shift
    if state.scheme == NEWTON:
        c, low = scipy.linalg.cho_factor(state.block)
        return scipy.linalg.cho_solve((c, low), h)
    return state.inv_estimate @ h
