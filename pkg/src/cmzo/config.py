"""Plain-text ``key = value`` experiment configuration.

One key per line; ``#`` starts a comment; unknown keys are errors.  See
the README for the full key table.  ``edges`` accepts ``"0-1,1-2,2-0"``
and implies an explicit topology.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

__all__ = ["ExperimentConfig", "parse_config_text", "load_config"]

_BOOL = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


@dataclass
class ExperimentConfig:
    # graph
    topology: str = "ring"
    n: int = 6
    er_p: float = 0.5
    edges: list[tuple[int, int]] | None = None
    graph_seed: int = 0
    # compressor
    compressor: str = "quant2bit"
    k: int | None = None
    k2: int = 2
    scalar_bits: int = 32
    rand_scaled: bool = True
    omega: float | None = None  # validator override when no analytic value
    # zeroth-order estimator
    gamma_g: float = 0.99
    noise_var: float = 0.0
    perturbation: str = "bernoulli"
    # objective
    objective: str = "logistic"
    d: int = 30
    m_i: int = 200
    varpi: float = 0.001
    kappa: float = 1.0
    planted_seed: int = 0
    loss_scale: str = "mean"
    data_noise_var: float = 0.0
    quad_zero_b: bool = False
    # algorithm
    gamma_x: float = 0.3
    eta: float | None = 0.02
    eta_rule: str = "fixed"
    beta: float = 0.9
    horizon: int = 5000
    divergence_cap: float = 1e12
    # experiment
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    metric_eval_batch: int = 1000
    metric_every: int = 10
    # validator constant overrides (objectives supply defaults)
    l_f1: float | None = None
    l_f2: float | None = None
    gamma1: float | None = None


_PARSERS = {
    "topology": ("topology", str),
    "n": ("n", int),
    "er_p": ("er_p", float),
    "edges": ("edges", "edges"),
    "graph_seed": ("graph_seed", int),
    "compressor": ("compressor", str),
    "k": ("k", int),
    "k2": ("k2", int),
    "scalar_bits": ("scalar_bits", int),
    "rand_scaled": ("rand_scaled", "bool"),
    "omega": ("omega", float),
    "gamma_g": ("gamma_g", float),
    "noise_var": ("noise_var", float),
    "perturbation": ("perturbation", str),
    "objective": ("objective", str),
    "d": ("d", int),
    "m_i": ("m_i", int),
    "varpi": ("varpi", float),
    "kappa": ("kappa", float),
    "planted_seed": ("planted_seed", int),
    "loss_scale": ("loss_scale", str),
    "data_noise_var": ("data_noise_var", float),
    "quad_zero_b": ("quad_zero_b", "bool"),
    "gamma_x": ("gamma_x", float),
    "eta": ("eta", float),
    "eta_rule": ("eta_rule", str),
    "beta": ("beta", float),
    "T": ("horizon", int),
    "divergence_cap": ("divergence_cap", float),
    "seeds": ("seeds", "seeds"),
    "seed": ("seeds", "seed"),
    "metric_eval_batch": ("metric_eval_batch", int),
    "metric_every": ("metric_every", int),
    "l_f1": ("l_f1", float),
    "l_f2": ("l_f2", float),
    "gamma1": ("gamma1", float),
}


def _parse_edges(text: str) -> list[tuple[int, int]]:
    edges = []
    for part in text.replace('"', "").split(","):
        part = part.strip()
        if not part:
            continue
        try:
            i, j = part.split("-")
            edges.append((int(i), int(j)))
        except ValueError as exc:
            raise ConfigError(f"bad edge {part!r}, expected 'i-j'") from exc
    return edges


def parse_config_text(text: str) -> ExperimentConfig:
    cfg = ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        attr, kind = _PARSERS[key]
        try:
            if kind == "edges":
                parsed: object = _parse_edges(value)
                cfg.topology = "explicit"
            elif kind == "seeds":
                parsed = tuple(int(s) for s in value.split(",") if s.strip())
            elif kind == "seed":
                parsed = (int(value),)
            elif kind == "bool":
                parsed = _BOOL[value.lower()]
            else:
                parsed = kind(value)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {value!r}") from exc
        setattr(cfg, attr, parsed)
    _validate(cfg)
    return cfg


def load_config(path: Path | str) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.topology not in ("ring", "complete", "erdos_renyi", "explicit"):
        raise ConfigError(f"unknown topology {cfg.topology!r}")
    if cfg.objective not in ("logistic", "quadratic"):
        raise ConfigError(f"unknown objective {cfg.objective!r}")
    if cfg.eta_rule not in ("fixed", "horizon"):
        raise ConfigError(f"eta_rule must be fixed or horizon, got {cfg.eta_rule!r}")
    if cfg.eta_rule == "fixed" and (cfg.eta is None or cfg.eta <= 0):
        raise ConfigError("fixed eta_rule requires eta > 0")
    if not cfg.seeds:
        raise ConfigError("seeds must be non-empty")
    if cfg.metric_eval_batch < 1:
        raise ConfigError("metric_eval_batch must be >= 1")
    if cfg.metric_every < 1:
        raise ConfigError("metric_every must be >= 1")
    if cfg.compressor in ("rand_k", "top_k") and cfg.k is None:
        raise ConfigError(f"{cfg.compressor} requires key 'k'")
