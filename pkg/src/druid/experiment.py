"""Experiment configuration, run loop, and trace emission.

A run builds the graph and per-agent objectives from a sparse text
dataset, computes the centralized reference, iterates the network for the
configured number of rounds, and writes a CSV trace with header
``t,cost_err,dist_err,r_opt,r_cons,r_reg,comm_scalars``.  Everything is
seeded, so identical configurations produce byte-identical traces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .activation import ActivationSampler, async_step, sample_activation
from .analysis import kkt_residuals
from .curvature import SCHEMES, Hyperparams
from .datasets import Dataset, binarize_labels, dense_features, parse_libsvm, partition
from .errors import ConfigurationError
from .network import ConsensusProblem, NetworkState, init_network, sync_step
from .problems import (
    L1,
    LEAST_SQUARES,
    LOGISTIC,
    SQUARED_L2,
    LocalObjective,
    Regularizer,
    aggregate_smoothness,
)
from .reference import centralized_reference
from .topology import random_connected_graph

PROBLEM_KINDS = ("lasso", "logistic_l1", "ridge")


@dataclass
class ExperimentConfig:
    problem: str
    dataset: str
    gamma: float = 0.0
    agents: int = 10
    edge_prob: float = 0.5
    graph_seed: int = 0
    partition_seed: int = 1
    scheme: str = "gradient"
    mu_z: float = 1.0
    mu_theta: float = 0.5
    epsilon: float = None   # default: 0.55 * measured M_f, safely above M_f / 2
    leader: int = 0
    psi: float = 1.0
    bfgs_bounding: bool = False
    mode: str = "sync"
    activation: str = "bernoulli"
    activation_p: float = 0.5
    activation_count: int = 1
    activation_seed: int = 2
    iterations: int = 1000
    cadence: int = 1
    output: str = "trace.csv"
    ref_tol: float = 1e-12
    ref_max_iter: int = 2_000_000
    cost_iterate: str = "average"   # or "leader": which iterate the cost error reports

    def __post_init__(self):
        if self.problem not in PROBLEM_KINDS:
            raise ConfigurationError(f"unknown problem kind {self.problem!r}")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")
        if self.mode not in ("sync", "async"):
            raise ConfigurationError(f"mode must be sync or async, got {self.mode!r}")
        if self.activation not in ("bernoulli", "fixed_count"):
            raise ConfigurationError(f"unknown activation mode {self.activation!r}")
        if self.iterations < 1:
            raise ConfigurationError("iterations must be at least 1")
        if self.cadence < 1:
            raise ConfigurationError("cadence must be at least 1")
        if self.cost_iterate not in ("average", "leader"):
            raise ConfigurationError(f"unknown cost iterate {self.cost_iterate!r}")

    def hyperparams(self, measured_M_f: float = None) -> Hyperparams:
        epsilon = self.epsilon
        if epsilon is None:
            if measured_M_f is None:
                raise ConfigurationError("epsilon not set and no measured smoothness given")
            epsilon = 0.55 * measured_M_f
        return Hyperparams(
            mu_z=self.mu_z, mu_theta=self.mu_theta, epsilon=epsilon,
            scheme=self.scheme, leader=self.leader, psi=self.psi,
            bfgs_bounding=self.bfgs_bounding,
        )


def load_config(path, overrides: dict = None) -> ExperimentConfig:
    """Read a JSON key-value config file and apply overrides on top."""
    with open(path) as fh:
        data = json.load(fh)
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**data)


def build_problem(cfg: ExperimentConfig, ds: Dataset, graph) -> ConsensusProblem:
    """Per-agent objectives from a seeded even partition of the dataset."""
    parts = partition(ds, cfg.agents, cfg.partition_seed)
    if cfg.problem == "logistic_l1":
        kind = LOGISTIC
        regularizer = Regularizer(L1, cfg.gamma)
    elif cfg.problem == "lasso":
        kind = LEAST_SQUARES
        regularizer = Regularizer(L1, cfg.gamma)
    else:
        kind = LEAST_SQUARES
        regularizer = Regularizer(SQUARED_L2, cfg.gamma)
    all_labels = np.array([row[0] for row in ds.rows])
    objectives = []
    for rows in parts:
        X, y = dense_features(ds, rows)
        if kind == LOGISTIC:
            y = binarize_labels(y, reference=all_labels)
        objectives.append(LocalObjective(kind, X, y))
    return ConsensusProblem(objectives=objectives, regularizer=regularizer)


@dataclass(frozen=True)
class TraceRecord:
    t: int
    cost_err: float
    dist_err: float
    r_opt: float
    r_cons: float
    r_reg: float
    comm_scalars: int


def _metrics(ns: NetworkState, cfg: ExperimentConfig, ref, cost0: float,
             dist0: float) -> TraceRecord:
    X = ns.stack_x()
    point = X[cfg.leader] if cfg.cost_iterate == "leader" else X.mean(axis=0)
    cost = ns.problem.total_value(point)
    dist = float(np.linalg.norm(X - ref.x_star[None, :]))
    r_opt, r_cons, r_reg = kkt_residuals(ns)
    rec = TraceRecord(
        t=ns.t,
        cost_err=(cost - ref.cost_star) / cost0,
        dist_err=dist / dist0,
        r_opt=r_opt, r_cons=r_cons, r_reg=r_reg,
        comm_scalars=ns.comm_scalars,
    )
    for value in (rec.cost_err, rec.dist_err, rec.r_opt, rec.r_cons, rec.r_reg):
        if not np.isfinite(value):
            raise ConfigurationError(f"non-finite trace metric at t={ns.t}")
    return rec


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Execute one configured run and write its trace; returns the path."""
    with open(cfg.dataset) as fh:
        ds = parse_libsvm(fh)
    graph = random_connected_graph(cfg.agents, cfg.edge_prob, cfg.graph_seed)
    problem = build_problem(cfg, ds, graph)
    ref = centralized_reference(problem, tol=cfg.ref_tol, max_iter=cfg.ref_max_iter)
    zero = np.zeros(problem.d)
    cost0 = problem.total_value(zero) - ref.cost_star
    dist0 = float(np.linalg.norm(np.tile(ref.x_star, (cfg.agents, 1))))
    if cost0 <= 0 or dist0 == 0:
        raise ConfigurationError("zero initial suboptimality; nothing to normalize by")
    hp = cfg.hyperparams(aggregate_smoothness(problem.objectives).M_f)
    ns = init_network(problem, graph, hp)
    sampler = None
    if cfg.mode == "async":
        if cfg.activation == "bernoulli":
            sampler = ActivationSampler.bernoulli(cfg.activation_p, cfg.agents, cfg.activation_seed)
        else:
            sampler = ActivationSampler.fixed_count(cfg.activation_count, cfg.agents, cfg.activation_seed)
    records = [_metrics(ns, cfg, ref, cost0, dist0)]
    try:
        for _ in range(cfg.iterations):
            if sampler is None:
                sync_step(ns, hp)
            else:
                async_step(ns, sample_activation(sampler, ns.t), hp)
            if ns.t % cfg.cadence == 0 or ns.t == cfg.iterations:
                records.append(_metrics(ns, cfg, ref, cost0, dist0))
    except Exception as exc:
        raise RuntimeError(
            f"{cfg.problem} run aborted at iteration {ns.t}: {exc}"
        ) from exc
    out = Path(cfg.output)
    with open(out, "w") as fh:
        fh.write("t,cost_err,dist_err,r_opt,r_cons,r_reg,comm_scalars\n")
        for rec in records:
            fh.write(
                f"{rec.t},{rec.cost_err!r},{rec.dist_err!r},{rec.r_opt!r},"
                f"{rec.r_cons!r},{rec.r_reg!r},{rec.comm_scalars}\n"
            )
    return out
