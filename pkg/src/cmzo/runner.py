"""Seeded multi-run experiments, metrics, CSV traces and sweeps.

Metrics are evaluated on a stride (default every 10 iterations) from a
dedicated random stream, so instrumentation can never perturb the
trajectory.  The headline metric ``p_metric`` is the running minimum over
evaluated iterations of ``grad_sq + consensus_err``:

* ``consensus_err``  -- (1/n) sum_i ||x_i - xbar||^2
* ``grad_sq``        -- ||grad F(xbar)||^2, estimated with the analytic
  gradient of the expected objective on a fresh evaluation batch (exact
  for the quadratic objective)
* ``chi``            -- ||x - xbar||_F^2 + ||x - xhat||_F^2
* ``bits_cum``       -- total bits broadcast so far

Per-seed CSV files are byte-identical on rerun with the same config; a
diverged seed keeps its partial trace, gains a ``diverged_at`` column and
is excluded from aggregates with a warning.
"""

from __future__ import annotations

import copy
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .compression import Compressor
from .config import ExperimentConfig
from .engine import AlgorithmConfig, NetworkState, experiment_streams, run
from .errors import ConfigError, NumericalDivergence
from .graph import MixingMatrix, build_topology, metropolis_weights
from .objectives import LocalObjective, LogisticObjective, make_quadratic_agents
from .zo import ZOConfig

__all__ = [
    "MetricsRow",
    "SeedResult",
    "ExperimentResult",
    "CSV_HEADER",
    "compute_metrics",
    "network_gradient",
    "build_setup",
    "run_experiment",
    "sweep",
    "SWEEP_PARAMS",
]

CSV_HEADER = "t,consensus_err,grad_sq,chi,p_metric,bits_cum"
SWEEP_PARAMS = ("gamma_g", "T", "eta", "beta", "gamma_x", "compressor")


@dataclass(frozen=True)
class MetricsRow:
    t: int
    consensus_err: float
    grad_sq: float
    chi: float
    p_metric: float
    bits_cum: int


def network_gradient(
    objectives: Sequence[LocalObjective],
    x: np.ndarray,
    batch_size: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Gradient of the network-average expected objective at ``x``."""
    total = np.zeros_like(x, dtype=float)
    for obj in objectives:
        total += obj.expected_grad(x, batch_size, rng)
    return total / len(objectives)


def compute_metrics(
    state: NetworkState,
    objectives: Sequence[LocalObjective],
    batch_size: int,
    rng: np.random.Generator,
    prev_p: float,
    bits_cum: int,
) -> MetricsRow:
    xbar = state.x.mean(axis=0)
    dev = state.x - xbar
    consensus_err = float(np.sum(dev**2)) / state.n
    grad = network_gradient(objectives, xbar, batch_size, rng)
    grad_sq = float(np.sum(grad**2))
    chi = float(np.sum(dev**2) + np.sum((state.x - state.x_hat) ** 2))
    p_metric = min(prev_p, grad_sq + consensus_err)
    return MetricsRow(state.t, consensus_err, grad_sq, chi, p_metric, bits_cum)


@dataclass
class SeedResult:
    seed: int
    rows: list[MetricsRow]
    diverged_at: int | None = None

    @property
    def completed(self) -> bool:
        return self.diverged_at is None


@dataclass
class ExperimentResult:
    per_seed: dict[int, SeedResult]
    aggregate: list[MetricsRow]
    n_aggregated: int
    out_dir: Path | None = None
    seed_paths: dict[int, Path] = field(default_factory=dict)
    aggregate_path: Path | None = None

    @property
    def all_diverged(self) -> bool:
        return self.n_aggregated == 0


@dataclass(frozen=True)
class RunSetup:
    mixing: MixingMatrix
    objectives: list[LocalObjective]
    algorithm: AlgorithmConfig


def build_setup(cfg: ExperimentConfig) -> RunSetup:
    """Materialize the mixing matrix, per-agent objectives and algorithm
    configuration from a parsed experiment config."""
    topo = build_topology(
        cfg.topology, cfg.n, seed=cfg.graph_seed, er_p=cfg.er_p, edges=cfg.edges
    )
    mixing = metropolis_weights(topo)
    if cfg.objective == "logistic":
        shared = LogisticObjective(
            d=cfg.d,
            m_i=cfg.m_i,
            varpi=cfg.varpi,
            kappa=cfg.kappa,
            planted_seed=cfg.planted_seed,
            loss_scale=cfg.loss_scale,
        )
        objectives: list[LocalObjective] = [shared] * cfg.n
    elif cfg.objective == "quadratic":
        objectives = list(
            make_quadratic_agents(
                cfg.n,
                cfg.d,
                seed=cfg.planted_seed,
                noise_var=cfg.data_noise_var,
                zero_b=cfg.quad_zero_b,
            )
        )
    else:
        raise ConfigError(f"unknown objective {cfg.objective!r}")
    compressor = Compressor(
        kind=cfg.compressor,
        k=cfg.k,
        k2=cfg.k2,
        scalar_bits=cfg.scalar_bits,
        rand_scaled=cfg.rand_scaled,
    )
    zo = ZOConfig(gamma_g=cfg.gamma_g, noise_var=cfg.noise_var, perturbation=cfg.perturbation)
    algorithm = AlgorithmConfig(
        mixing=mixing,
        compressor=compressor,
        zo=zo,
        gamma_x=cfg.gamma_x,
        beta=cfg.beta,
        horizon=cfg.horizon,
        eta=cfg.eta,
        eta_rule=cfg.eta_rule,
        divergence_cap=cfg.divergence_cap,
    )
    return RunSetup(mixing=mixing, objectives=objectives, algorithm=algorithm)


def _run_one_seed(setup: RunSetup, cfg: ExperimentConfig, seed: int) -> SeedResult:
    stride = cfg.metric_every
    horizon = cfg.horizon
    _, _, metric_rng = experiment_streams(seed, setup.mixing.n)
    rows: list[MetricsRow] = []
    bits_cum = 0
    prev_p = float("inf")

    def on_step(state: NetworkState, rec) -> None:
        nonlocal bits_cum, prev_p
        bits_cum += rec.bits
        if state.t % stride == 0 or state.t == horizon:
            row = compute_metrics(
                state, setup.objectives, cfg.metric_eval_batch, metric_rng, prev_p, bits_cum
            )
            prev_p = row.p_metric
            rows.append(row)

    try:
        run(setup.algorithm, setup.objectives, seed, x0=None, on_step=on_step)
    except NumericalDivergence as exc:
        warnings.warn(f"seed {seed} diverged at t={exc.t}; excluded from aggregates")
        return SeedResult(seed=seed, rows=rows, diverged_at=exc.t)
    return SeedResult(seed=seed, rows=rows)


def _aggregate(results: list[SeedResult]) -> tuple[list[MetricsRow], int]:
    completed = [r for r in results if r.completed]
    if not completed:
        return [], 0
    n_rows = len(completed[0].rows)
    agg: list[MetricsRow] = []
    for idx in range(n_rows):
        rows = [r.rows[idx] for r in completed]
        agg.append(
            MetricsRow(
                t=rows[0].t,
                consensus_err=float(np.mean([r.consensus_err for r in rows])),
                grad_sq=float(np.mean([r.grad_sq for r in rows])),
                chi=float(np.mean([r.chi for r in rows])),
                p_metric=float(np.mean([r.p_metric for r in rows])),
                bits_cum=int(round(np.mean([r.bits_cum for r in rows]))),
            )
        )
    return agg, len(completed)


def _write_csv(path: Path, rows: list[MetricsRow], extra: tuple[str, object] | None = None) -> None:
    header = CSV_HEADER if extra is None else f"{CSV_HEADER},{extra[0]}"
    lines = [header]
    for r in rows:
        line = f"{r.t},{r.consensus_err!r},{r.grad_sq!r},{r.chi!r},{r.p_metric!r},{r.bits_cum}"
        if extra is not None:
            line += f",{extra[1]}"
        lines.append(line)
    path.write_text("\n".join(lines) + "\n")


def run_experiment(cfg: ExperimentConfig, out_dir: Path | str | None = None) -> ExperimentResult:
    """Run every seed, write per-seed and aggregate CSV traces."""
    setup = build_setup(cfg)
    results = [_run_one_seed(setup, cfg, seed) for seed in cfg.seeds]
    aggregate, n_ok = _aggregate(results)
    exp = ExperimentResult(
        per_seed={r.seed: r for r in results}, aggregate=aggregate, n_aggregated=n_ok
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        exp.out_dir = out
        for r in results:
            path = out / f"seed_{r.seed}.csv"
            extra = None if r.completed else ("diverged_at", r.diverged_at)
            _write_csv(path, r.rows, extra)
            exp.seed_paths[r.seed] = path
        agg_path = out / "aggregate.csv"
        _write_csv(agg_path, aggregate, ("n_seeds", n_ok))
        exp.aggregate_path = agg_path
    return exp


def _apply_param(cfg: ExperimentConfig, param: str, value: str) -> ExperimentConfig:
    if param == "gamma_g":
        return replace(cfg, gamma_g=float(value))
    if param == "T":
        return replace(cfg, horizon=int(value))
    if param == "eta":
        return replace(cfg, eta=float(value), eta_rule="fixed")
    if param == "beta":
        return replace(cfg, beta=float(value))
    if param == "gamma_x":
        return replace(cfg, gamma_x=float(value))
    if param == "compressor":
        return replace(cfg, compressor=value)
    raise ConfigError(f"sweep parameter must be one of {SWEEP_PARAMS}, got {param!r}")


def sweep(
    cfg: ExperimentConfig,
    param: str,
    values: Sequence[str],
    out_dir: Path | str | None = None,
) -> dict[str, ExperimentResult]:
    """One experiment per value with identical seeds; summary CSV on disk."""
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"sweep parameter must be one of {SWEEP_PARAMS}, got {param!r}")
    out = Path(out_dir) if out_dir is not None else None
    results: dict[str, ExperimentResult] = {}
    summary_lines = ["value,final_p_metric,final_consensus_err,bits_cum"]
    for value in values:
        sub_cfg = _apply_param(copy.deepcopy(cfg), param, str(value))
        sub_out = out / f"{param}_{value}" if out is not None else None
        res = run_experiment(sub_cfg, sub_out)
        results[str(value)] = res
        if res.aggregate:
            last = res.aggregate[-1]
            summary_lines.append(
                f"{value},{last.p_metric!r},{last.consensus_err!r},{last.bits_cum}"
            )
        else:
            summary_lines.append(f"{value},nan,nan,0")
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep_summary.csv").write_text("\n".join(summary_lines) + "\n")
    return results
