"""Simulated multi-agent network and the primal-dual iteration.

Each agent holds its primal variable x_i, a dual variable phi_i, and a
buffer of the last value received from every neighbor.  The leader agent
additionally holds the pair (theta, lambda) coupling the shared variable
to the regularizer.  One iteration runs, for each participating agent and
in this order: curvature refresh, primal update from buffered neighbor
values, broadcast of the new iterate, dual updates, and (for BFGS) the
curvature-pair update.  Broadcasts complete before any dual update so the
full-participation case is exactly the synchronous algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import curvature as cv
from .curvature import CurvatureState, Hyperparams
from .errors import ConfigurationError
from .problems import Regularizer, prox
from .topology import Graph


@dataclass
class ConsensusProblem:
    """One local objective per agent plus the shared regularizer."""

    objectives: list
    regularizer: Regularizer = Regularizer()

    def __post_init__(self):
        if not self.objectives:
            raise ConfigurationError("need at least one local objective")
        dims = {obj.d for obj in self.objectives}
        if len(dims) != 1:
            raise ConfigurationError(f"objective dimensions differ: {sorted(dims)}")

    @property
    def m(self) -> int:
        return len(self.objectives)

    @property
    def d(self) -> int:
        return self.objectives[0].d

    def total_value(self, x: np.ndarray) -> float:
        """Centralized composite cost at a single shared point."""
        return sum(obj.value(x) for obj in self.objectives) + self.regularizer.value(x)

    def total_gradient(self, x: np.ndarray) -> np.ndarray:
        return sum(obj.gradient(x) for obj in self.objectives)


@dataclass
class AgentState:
    """Variables owned by one agent; theta/lam are None except at the leader."""

    x: np.ndarray
    phi: np.ndarray
    buffer: dict
    curvature: CurvatureState
    theta: np.ndarray = None
    lam: np.ndarray = None


@dataclass
class NetworkState:
    graph: Graph
    problem: ConsensusProblem
    agents: list
    leader: int = 0
    t: int = 0
    comm_scalars: int = 0

    def stack_x(self) -> np.ndarray:
        return np.stack([ag.x for ag in self.agents])

    def stack_phi(self) -> np.ndarray:
        return np.stack([ag.phi for ag in self.agents])


def init_network(problem: ConsensusProblem, graph: Graph, hp: Hyperparams) -> NetworkState:
    """Zero-initialized network; curvature state per the chosen scheme."""
    if problem.m != graph.m:
        raise ConfigurationError(
            f"{problem.m} objectives for {graph.m} agents"
        )
    if not (0 <= hp.leader < graph.m):
        raise ConfigurationError(f"leader {hp.leader} out of range for m={graph.m}")
    d = problem.d
    agents = []
    zero = np.zeros(d)
    for i in range(graph.m):
        shift = cv.block_diag_value(hp, graph.degree(i), i == hp.leader)
        grad0 = problem.objectives[i].gradient(zero) if hp.scheme == cv.BFGS else None
        state = AgentState(
            x=np.zeros(d),
            phi=np.zeros(d),
            buffer={j: np.zeros(d) for j in graph.neighbors(i)},
            curvature=cv.init_curvature(hp.scheme, d, shift, grad0),
        )
        if i == hp.leader:
            state.theta = np.zeros(d)
            state.lam = np.zeros(d)
        agents.append(state)
    return NetworkState(graph=graph, problem=problem, agents=agents, leader=hp.leader)


def local_gradient(i: int, ns: NetworkState, hp: Hyperparams) -> np.ndarray:
    """Gradient of the augmented Lagrangian with respect to x_i.

    Neighbor values are read from agent i's buffer, so the result is well
    defined under stale information.  For BFGS the local-objective gradient
    stored at the agent's last update is reused (it was evaluated at the
    same iterate).
    """
    ag = ns.agents[i]
    st = ag.curvature
    if hp.scheme == cv.BFGS:
        grad = st.grad_prev
    else:
        grad = ns.problem.objectives[i].gradient(ag.x)
    h = grad + ag.phi
    coupling = len(ag.buffer) * ag.x - sum(ag.buffer.values())
    h = h + 0.5 * hp.mu_z * coupling
    if i == hp.leader:
        h = h + hp.mu_theta * (ag.x - ag.theta) + ag.lam
    return h


def primal_update(i: int, ns: NetworkState, hp: Hyperparams) -> np.ndarray:
    """Refresh agent i's curvature, step x_i along the solved direction."""
    ag = ns.agents[i]
    if hp.scheme == cv.NEWTON:
        ag.curvature.block = cv.newton_block(
            ns.problem.objectives[i], ag.x, hp, ns.graph.degree(i), i == hp.leader
        )
    h = local_gradient(i, ns, hp)
    ag.x = ag.x - cv.solve_direction(ag.curvature, h)
    return ag.x


def broadcast(i: int, ns: NetworkState) -> None:
    """Deposit agent i's current iterate in every neighbor's buffer."""
    x = ns.agents[i].x
    for j in ns.graph.neighbors(i):
        ns.agents[j].buffer[i] = x.copy()


def dual_updates(ns: NetworkState, hp: Hyperparams, active=None) -> None:
    """Dual ascent along every edge with a participating endpoint.

    The consensus duals live on edges; an edge whose source or destination
    participated moves by half the penalty times the disagreement, entering
    both endpoints' phi with opposite signs (so the aggregate dual stays in
    the range of the signed incidence even under partial participation).
    Endpoints read each other through buffers, which the preceding
    broadcast has refreshed.  The participating leader then applies the
    proximal map and its multiplier step.
    """
    if active is None:
        active = range(ns.graph.m)
    active_set = set(active)
    for i, j in ns.graph.edges:
        if i in active_set or j in active_set:
            delta = 0.5 * hp.mu_z * (ns.agents[i].x - ns.agents[i].buffer[j])
            ns.agents[i].phi = ns.agents[i].phi + delta
            ns.agents[j].phi = ns.agents[j].phi - delta
    if hp.leader in active_set:
        ag = ns.agents[hp.leader]
        theta_new = prox(ns.problem.regularizer, hp.mu_theta, ag.x + ag.lam / hp.mu_theta)
        ag.lam = ag.lam + hp.mu_theta * (ag.x - theta_new)
        ag.theta = theta_new


def _bfgs_refresh(i: int, ns: NetworkState, hp: Hyperparams) -> None:
    """End-of-iteration curvature-pair update; the fresh gradient becomes
    the next iteration's stored local gradient."""
    ag = ns.agents[i]
    st = ag.curvature
    grad_new = ns.problem.objectives[i].gradient(ag.x)
    s, q = cv.bfgs_pair(st, ag.x, grad_new)
    updated = cv.bfgs_inverse_update(
        st.inv_estimate, s, q, psi=hp.psi if hp.bfgs_bounding else None
    )
    st.last_pair = (s, q, updated is not st.inv_estimate)
    st.inv_estimate = updated
    st.x_prev = ag.x.copy()
    st.grad_prev = grad_new


def apply_step(ns: NetworkState, hp: Hyperparams, active) -> NetworkState:
    """Advance the network one iteration with the given participant set."""
    active = sorted(active)
    for i in active:
        primal_update(i, ns, hp)
    for i in active:
        broadcast(i, ns)
        ns.comm_scalars += ns.graph.degree(i) * ns.problem.d
    dual_updates(ns, hp, active)
    if hp.scheme == cv.BFGS:
        for i in active:
            _bfgs_refresh(i, ns, hp)
    ns.t += 1
    return ns


def sync_step(ns: NetworkState, hp: Hyperparams) -> NetworkState:
    """One synchronous iteration: every agent participates."""
    return apply_step(ns, hp, range(ns.graph.m))
