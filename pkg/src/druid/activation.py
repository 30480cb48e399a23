"""Randomized agent activation for asynchronous execution.

An activation record names the agents that participate in one iteration;
everyone else keeps their variables and only their buffers may change
(when an active neighbor broadcasts).  Sampling is deterministic given
the sampler seed and the iteration index, so traces are reproducible
regardless of how many iterations were drawn before.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import Hyperparams
from .network import NetworkState, apply_step

BERNOULLI = "bernoulli"
FIXED_COUNT = "fixed_count"


@dataclass(frozen=True)
class ActivationRecord:
    t: int
    active: tuple


@dataclass
class ActivationSampler:
    """Per-iteration activation draw.

    Bernoulli mode includes each agent i independently with probability
    p_i (possibly empty, a no-op iteration); fixed-count mode draws a
    uniform k-subset.
    """

    mode: str
    m: int
    seed: int
    probabilities: np.ndarray = None
    count: int = None

    def __post_init__(self):
        if self.mode == BERNOULLI:
            p = np.broadcast_to(np.asarray(self.probabilities, dtype=float), (self.m,)).copy()
            if np.any(p <= 0.0) or np.any(p > 1.0):
                raise ValueError("activation probabilities must lie in (0, 1]")
            self.probabilities = p
        elif self.mode == FIXED_COUNT:
            if not (1 <= int(self.count) <= self.m):
                raise ValueError(f"count must be in [1, {self.m}], got {self.count}")
            self.count = int(self.count)
        else:
            raise ValueError(f"unknown activation mode {self.mode!r}")

    @classmethod
    def bernoulli(cls, p, m: int, seed: int) -> "ActivationSampler":
        return cls(mode=BERNOULLI, m=m, seed=seed, probabilities=p)

    @classmethod
    def fixed_count(cls, k: int, m: int, seed: int) -> "ActivationSampler":
        return cls(mode=FIXED_COUNT, m=m, seed=seed, count=k)


def sample_activation(sampler: ActivationSampler, t: int) -> ActivationRecord:
    """Draw the active set for iteration t; deterministic in (seed, t)."""
    rng = np.random.default_rng((sampler.seed, t))
    if sampler.mode == BERNOULLI:
        active = np.flatnonzero(rng.random(sampler.m) < sampler.probabilities)
    else:
        active = np.sort(rng.choice(sampler.m, size=sampler.count, replace=False))
    return ActivationRecord(t=t, active=tuple(int(i) for i in active))


def async_step(ns: NetworkState, record: ActivationRecord, hp: Hyperparams) -> NetworkState:
    """One asynchronous iteration: only the recorded agents update.

    Active agents read possibly stale neighbor values from their buffers;
    theta and lambda move only when the leader is active.  Full activation
    reproduces the synchronous step exactly.
    """
    return apply_step(ns, hp, record.active)
