"""Single-point zeroth-order gradient estimation.

The estimator perturbs the query point by ``gamma_g * u`` with a random
symmetric direction ``u``, makes exactly one (noisy) function query, and
returns ``g = (d / gamma_g) * (f(x + gamma_g u, xi) + phi) * u``.  Its
conditional mean is ``d * sigma1 * (grad F(x) + b)`` where the bias ``b``
is bounded by ``(gamma_g / (2 sigma1)) * sigma2^3 * H`` for any bound ``H``
on the objective Hessian norm, so the bias shrinks linearly with the
smoothing radius while the second moment grows like ``1 / gamma_g^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .errors import QueryFailure

__all__ = ["ZOConfig", "sample_perturbation", "one_point_gradient", "bias_bound"]


@dataclass(frozen=True)
class ZOConfig:
    """Estimator parameters.

    ``perturbation="bernoulli"`` draws each coordinate of ``u``
    independently from {-1/sqrt(d), +1/sqrt(d)}, giving ``sigma1 = 1/d``
    (coordinate second moment), ``sigma2 = 1`` (norm bound, exact here).
    A ``custom`` perturbation only carries documented ``(sigma1, sigma2)``
    for analysis; no sampler is provided for it.

    ``noise_var`` is the variance of the additive query noise ``phi``,
    drawn Gaussian (the contract constrains only mean/variance, so the
    family is a documented choice).
    """

    gamma_g: float
    noise_var: float = 0.0
    perturbation: str = "bernoulli"
    sigma1_custom: float | None = None
    sigma2_custom: float | None = None

    def __post_init__(self) -> None:
        if self.gamma_g <= 0:
            raise ValueError(f"gamma_g must be > 0, got {self.gamma_g}")
        if self.noise_var < 0:
            raise ValueError(f"noise_var must be >= 0, got {self.noise_var}")
        if self.perturbation not in ("bernoulli", "custom"):
            raise ValueError(f"unknown perturbation {self.perturbation!r}")
        if self.perturbation == "custom" and (
            self.sigma1_custom is None or self.sigma2_custom is None
        ):
            raise ValueError("custom perturbation needs sigma1 and sigma2")

    def sigma1(self, d: int) -> float:
        if self.perturbation == "bernoulli":
            return 1.0 / d
        return float(self.sigma1_custom)

    def sigma2(self, d: int) -> float:
        if self.perturbation == "bernoulli":
            return 1.0
        return float(self.sigma2_custom)


def sample_perturbation(cfg: ZOConfig, d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw the perturbation direction; scaled Bernoulli has unit norm."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if cfg.perturbation != "bernoulli":
        raise ValueError(f"no sampler for perturbation {cfg.perturbation!r}")
    signs = rng.integers(0, 2, size=d) * 2 - 1
    return signs / math.sqrt(d)


def one_point_gradient(
    query: Callable[[np.ndarray, Any], float],
    x: np.ndarray,
    cfg: ZOConfig,
    xi: Any,
    rng: np.random.Generator,
) -> np.ndarray:
    """One-point estimate of the gradient at ``x`` from a single query.

    Draw order is fixed as (u, phi) on ``rng`` -- callers sample ``xi``
    beforehand on the same stream, pinning the per-step layout to
    (xi, u, phi).  ``phi`` is drawn even when ``noise_var == 0`` so the
    stream layout does not depend on the noise setting.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    u = sample_perturbation(cfg, d, rng)
    try:
        fval = float(query(x + cfg.gamma_g * u, xi))
    except Exception as exc:
        raise QueryFailure(f"objective query failed: {exc}") from exc
    phi = rng.standard_normal() * math.sqrt(cfg.noise_var)
    return (d / cfg.gamma_g) * (fval + phi) * u


def bias_bound(cfg: ZOConfig, d: int, hessian_bound: float) -> float:
    """Upper bound ``(gamma_g / (2 sigma1)) * sigma2^3 * hessian_bound`` on
    the norm of the estimator's conditional bias relative to the true
    gradient.  Scales linearly in ``gamma_g``."""
    if hessian_bound < 0:
        raise ValueError(f"hessian_bound must be >= 0, got {hessian_bound}")
    s1 = cfg.sigma1(d)
    s2 = cfg.sigma2(d)
    return (cfg.gamma_g / (2.0 * s1)) * s2**3 * hessian_bound
