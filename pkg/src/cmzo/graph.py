"""Communication topologies and doubly stochastic mixing matrices.

A run is defined over a fixed connected undirected graph.  The gossip step
uses a symmetric doubly stochastic weight matrix ``W`` built with
Metropolis-Hastings weights, which are valid for any connected graph
without tuning.  Two spectral quantities drive the analysis and the
parameter validator:

* ``delta``  -- spectral gap ``1 - max_{i>=2} |lambda_i(W)|``; equivalently
  ``1 - ||W - (1/n) 1 1^T||_2``, so one gossip round contracts disagreement
  by ``1 - delta``.
* ``lambda_dev`` -- ``max_i (1 - lambda_i(W)) = 1 - lambda_min(W)``, which
  bounds ``||W - I||_2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConnectivityFailure, SpectrumViolation

__all__ = [
    "Topology",
    "MixingMatrix",
    "build_topology",
    "metropolis_weights",
    "spectral_quantities",
    "validate_mixing_matrix",
]

STOCHASTIC_TOL = 1e-12
LEMMA6_TOL = 1e-10
MAX_ER_ATTEMPTS = 1000


@dataclass(frozen=True)
class Topology:
    """Undirected graph over agents ``0..n-1``.

    Edges are canonicalised as ``(i, j)`` with ``i < j``; self-loops are
    rejected (self-weights live in the mixing matrix, not the graph).
    """

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one agent, got n={self.n}")
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop ({i},{j}) not allowed")
            if not (0 <= i < j < self.n):
                raise ValueError(f"edge ({i},{j}) out of range for n={self.n}")
        unreachable = _unreachable_from_zero(self.n, self.edges)
        if unreachable:
            raise ConnectivityFailure(
                f"graph disconnected: agents {sorted(unreachable)} unreachable from 0"
            )

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for i, j in self.edges:
            a[i, j] = a[j, i] = 1.0
        return a


@dataclass(frozen=True)
class MixingMatrix:
    """Symmetric doubly stochastic gossip weights with spectral quantities."""

    weights: np.ndarray
    spectral_gap: float  # delta in (0, 1]
    lambda_dev: float  # max_i(1 - lambda_i(W)); >= delta for n >= 2

    @property
    def n(self) -> int:
        return self.weights.shape[0]


def _unreachable_from_zero(n: int, edges: Iterable[tuple[int, int]]) -> set[int]:
    neigh: dict[int, list[int]] = {i: [] for i in range(n)}
    for i, j in edges:
        neigh[i].append(j)
        neigh[j].append(i)
    seen = {0}
    frontier = [0]
    while frontier:
        u = frontier.pop()
        for v in neigh[u]:
            if v not in seen:
                seen.add(v)
                frontier.append(v)
    return set(range(n)) - seen


def build_topology(
    kind: str,
    n: int,
    *,
    seed: int = 0,
    er_p: float = 0.5,
    edges: Iterable[Sequence[int]] | None = None,
) -> Topology:
    """Construct a connected topology.

    ``kind`` is one of ``ring``, ``complete``, ``erdos_renyi`` or
    ``explicit``.  Erdos-Renyi graphs are resampled (at most
    ``MAX_ER_ATTEMPTS`` times) until connected, keeping the conditional
    distribution simple.  An explicit edge list that is disconnected raises
    :class:`ConnectivityFailure`.
    """
    if n < 1:
        raise ValueError(f"need at least one agent, got n={n}")
    if kind == "ring":
        if n == 1:
            es: set[tuple[int, int]] = set()
        elif n == 2:
            es = {(0, 1)}
        else:
            es = {(min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n)}
        return Topology(n, frozenset(es))
    if kind == "complete":
        es = {(i, j) for i in range(n) for j in range(i + 1, n)}
        return Topology(n, frozenset(es))
    if kind == "erdos_renyi":
        if not 0.0 < er_p <= 1.0:
            raise ValueError(f"er_p must be in (0, 1], got {er_p}")
        rng = np.random.default_rng(seed)
        for _ in range(MAX_ER_ATTEMPTS):
            es = {
                (i, j)
                for i in range(n)
                for j in range(i + 1, n)
                if rng.random() < er_p
            }
            if not _unreachable_from_zero(n, es):
                return Topology(n, frozenset(es))
        raise ConnectivityFailure(
            f"no connected Erdos-Renyi graph in {MAX_ER_ATTEMPTS} attempts "
            f"(n={n}, p={er_p})"
        )
    if kind == "explicit":
        if edges is None:
            raise ValueError("explicit topology requires an edge list")
        es = {(min(int(i), int(j)), max(int(i), int(j))) for i, j in edges}
        return Topology(n, frozenset(es))  # connectivity checked in __post_init__
    raise ValueError(f"unknown topology kind {kind!r}")


def metropolis_weights(topology: Topology) -> MixingMatrix:
    """Metropolis-Hastings weights: ``w_ij = 1/(1 + max(deg_i, deg_j))`` on
    edges, diagonal chosen so rows sum to one.  Symmetric and doubly
    stochastic for any connected graph."""
    n = topology.n
    deg = topology.degrees()
    w = np.zeros((n, n))
    for i, j in topology.edges:
        w[i, j] = w[j, i] = 1.0 / (1.0 + max(deg[i], deg[j]))
    for i in range(n):
        w[i, i] = 1.0 - (w[i].sum() - w[i, i])
    delta, lam = spectral_quantities(w)
    m = MixingMatrix(w, delta, lam)
    validate_mixing_matrix(m, topology)
    return m


def spectral_quantities(w: np.ndarray) -> tuple[float, float]:
    """Spectral gap ``delta`` and eigenvalue deviation ``lambda_dev`` of a
    symmetric doubly stochastic matrix, via a dense symmetric eigensolve.

    Raises :class:`SpectrumViolation` if any non-leading eigenvalue has
    modulus >= 1 (which would mean the gossip map does not contract).
    """
    w = np.asarray(w, dtype=float)
    n = w.shape[0]
    if w.shape != (n, n):
        raise ValueError("mixing matrix must be square")
    if not np.allclose(w, w.T, atol=STOCHASTIC_TOL, rtol=0.0):
        raise ValueError("mixing matrix must be symmetric")
    if n == 1:
        return 1.0, 0.0
    evals = np.linalg.eigvalsh(w)  # ascending
    trailing = evals[:-1]
    worst = float(np.max(np.abs(trailing)))
    if worst >= 1.0:
        raise SpectrumViolation(
            f"non-leading eigenvalue modulus {worst} >= 1; "
            "graph must be connected with positive self-weights"
        )
    delta = 1.0 - worst
    lam = 1.0 - float(evals[0])
    return delta, lam


def validate_mixing_matrix(m: MixingMatrix, topology: Topology | None = None) -> None:
    """Check the structural invariants of a mixing matrix; raise on failure."""
    w = m.weights
    n = m.n
    ones = np.ones(n)
    if np.max(np.abs(w @ ones - ones)) > STOCHASTIC_TOL:
        raise ValueError("row sums deviate from 1 beyond tolerance")
    if np.max(np.abs(ones @ w - ones)) > STOCHASTIC_TOL:
        raise ValueError("column sums deviate from 1 beyond tolerance")
    if np.any(np.diag(w) <= 0):
        raise ValueError("all self-weights must be strictly positive")
    if not 0.0 < m.spectral_gap <= 1.0:
        raise ValueError(f"spectral gap {m.spectral_gap} outside (0, 1]")
    if n >= 2 and m.lambda_dev < m.spectral_gap - STOCHASTIC_TOL:
        raise ValueError("lambda_dev must dominate the spectral gap")
    if topology is not None:
        edge = topology.adjacency() > 0
        off = ~np.eye(n, dtype=bool)
        if np.any((w > 0) & off & ~edge) or np.any(edge & (w <= 0)):
            raise ValueError("off-diagonal support must match the edge set")
