"""Core per-iteration loop of the compressed momentum ZO method.

One iteration, over the whole network (rows of the state matrices are
agents):

1. each agent draws a data sample and a perturbation, makes one function
   query, and forms the one-point gradient estimate ``g_i``;
2. momentum update          ``m_i = beta * m_i + g_i``;
3. local half step          ``x_i+ = x_i - eta * (beta * m_i + g_i)``;
4. compressed broadcast     ``c_i = C(x_i+ - xhat_i)`` (one realization per
   agent, delivered identically to all neighbors and to the sender's own
   replica, so every node's copy of ``xhat_i`` stays exactly equal);
5. replica update           ``xhat_i += c_i``;
6. gossip consensus         ``x_i = x_i+ + gamma_x * sum_j w_ij (xhat_j - xhat_i)``.

The update ordering is locked to this compact form; reordering changes the
semantics.  The consensus step leaves the network average of the half-step
unchanged because ``(W - I)`` annihilates row means.

Reproducibility: per-agent random streams are spawned from the master seed
by agent index, and the per-step draw order within a stream is fixed as
(data sample, perturbation, query noise, compressor randomness).  Metrics
must use a separate stream (see :func:`experiment_streams`) so that
instrumentation can never perturb a trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import math

import numpy as np

from .compression import Compressor, compress
from .errors import NumericalDivergence
from .graph import MixingMatrix
from .objectives import LocalObjective
from .zo import ZOConfig, one_point_gradient

__all__ = [
    "AlgorithmConfig",
    "NetworkState",
    "StepRecord",
    "experiment_streams",
    "init",
    "step",
    "run",
    "horizon_step_size",
]


@dataclass(frozen=True)
class AlgorithmConfig:
    """Full parameterization of one run."""

    mixing: MixingMatrix
    compressor: Compressor
    zo: ZOConfig
    gamma_x: float  # consensus step size
    beta: float  # momentum coefficient in [0, 1)
    horizon: int  # iteration count T
    eta: float | None = None  # fixed step size; None under the horizon rule
    eta_rule: str = "fixed"  # "fixed" | "horizon"
    divergence_cap: float = 1e12

    def __post_init__(self) -> None:
        if self.gamma_x <= 0:
            raise ValueError(f"gamma_x must be > 0, got {self.gamma_x}")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must be in [0, 1), got {self.beta}")
        if self.horizon < 0:
            raise ValueError(f"horizon must be >= 0, got {self.horizon}")
        if self.eta_rule not in ("fixed", "horizon"):
            raise ValueError(f"unknown eta_rule {self.eta_rule!r}")
        if self.eta_rule == "fixed":
            if self.eta is None or self.eta <= 0:
                raise ValueError("fixed eta_rule requires eta > 0")

    def step_size(self) -> float:
        """Constant step size for the run.  Under the horizon rule it is
        set from the horizon as ``(1 - beta) * sqrt(n / T)``."""
        if self.eta_rule == "horizon":
            return horizon_step_size(self.beta, self.mixing.n, self.horizon)
        return float(self.eta)


def horizon_step_size(beta: float, n: int, horizon: int) -> float:
    if horizon < 1:
        raise ValueError("horizon rule needs T >= 1")
    return (1.0 - beta) * math.sqrt(n / horizon)


@dataclass
class NetworkState:
    """Stacked per-agent decision vectors, momenta and shared replicas."""

    x: np.ndarray  # n x d
    m: np.ndarray  # n x d
    x_hat: np.ndarray  # n x d
    t: int = 0

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class StepRecord:
    t: int  # iteration index that produced this state (1-based)
    bits: int  # total bits broadcast this iteration
    avg_drift: float  # |mean_i x_{t+1} - mean_i x_{t+1/2}|_inf
    g: np.ndarray | None = None  # raw estimates, kept only on request


def experiment_streams(
    seed: int, n: int
) -> tuple[list[np.random.Generator], np.random.Generator, np.random.Generator]:
    """Spawn the run's random streams from a master seed.

    Returns ``(agent_streams, init_stream, metric_stream)``; agent ``i``
    owns ``agent_streams[i]``.  The split is stable across calls, so a
    reference implementation fed the same seed sees identical draws.
    """
    children = np.random.SeedSequence(seed).spawn(n + 2)
    agents = [np.random.default_rng(s) for s in children[:n]]
    return agents, np.random.default_rng(children[n]), np.random.default_rng(children[n + 1])


def init(
    config: AlgorithmConfig,
    x0: np.ndarray | Callable[[np.random.Generator], np.ndarray] | None,
    d: int,
    rng: np.random.Generator,
) -> NetworkState:
    """Initial state: momenta and replicas start at zero.

    The replica recursion reads ``xhat`` at t = 0, so it is pinned to the
    all-zero start; with that choice the replica history is exactly the
    accumulation of every past compressed message.
    """
    n = config.mixing.n
    if x0 is None:
        x = np.zeros((n, d))
    elif callable(x0):
        x = np.asarray(x0(rng), dtype=float)
    else:
        x = np.array(x0, dtype=float)
    if x.shape != (n, d):
        raise ValueError(f"x0 must have shape ({n}, {d}), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("x0 must be finite")
    return NetworkState(x=x, m=np.zeros((n, d)), x_hat=np.zeros((n, d)), t=0)


def step(
    state: NetworkState,
    config: AlgorithmConfig,
    objectives: Sequence[LocalObjective],
    agent_rngs: Sequence[np.random.Generator],
    eta: float,
    keep_gradients: bool = False,
) -> StepRecord:
    """Advance the network by one iteration in place."""
    n, d = state.x.shape
    w = config.mixing.weights

    g = np.empty((n, d))
    for i in range(n):
        rng = agent_rngs[i]
        xi = objectives[i].sample_data(rng)
        g[i] = one_point_gradient(objectives[i].query, state.x[i], config.zo, xi, rng)

    state.m = config.beta * state.m + g
    half = state.x - eta * (config.beta * state.m + g)

    bits = 0
    payloads = np.empty((n, d))
    for i in range(n):
        msg = compress(config.compressor, half[i] - state.x_hat[i], agent_rngs[i])
        payloads[i] = msg.payload
        bits += msg.bits
    x_hat_next = state.x_hat + payloads

    x_next = half + config.gamma_x * (w @ x_hat_next - x_hat_next)

    if not np.all(np.isfinite(x_next)) or np.max(np.abs(x_next)) > config.divergence_cap:
        raise NumericalDivergence(state.t, f"iterate exceeded cap at t={state.t}")

    avg_drift = float(np.max(np.abs(x_next.mean(axis=0) - half.mean(axis=0))))

    state.x = x_next
    state.x_hat = x_hat_next
    state.t += 1
    return StepRecord(
        t=state.t, bits=bits, avg_drift=avg_drift, g=g.copy() if keep_gradients else None
    )


def run(
    config: AlgorithmConfig,
    objectives: Sequence[LocalObjective],
    seed: int,
    x0: np.ndarray | Callable[[np.random.Generator], np.ndarray] | None = None,
    keep_gradients: bool = False,
    on_step: Callable[[NetworkState, StepRecord], None] | None = None,
) -> tuple[NetworkState, list[StepRecord]]:
    """Execute ``horizon`` iterations; deterministic given the seed.

    A divergence in any iteration propagates as
    :class:`NumericalDivergence` carrying the offending ``t``.
    """
    n = config.mixing.n
    if len(objectives) != n:
        raise ValueError(f"need one objective per agent ({n}), got {len(objectives)}")
    d = objectives[0].dim
    agent_rngs, init_rng, _ = experiment_streams(seed, n)
    state = init(config, x0, d, init_rng)
    eta = config.step_size()
    records: list[StepRecord] = []
    for _ in range(config.horizon):
        rec = step(state, config, objectives, agent_rngs, eta, keep_gradients)
        records.append(rec)
        if on_step is not None:
            on_step(state, rec)
    return state, records
