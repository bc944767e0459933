"""Compression operators with bit accounting.

Every operator maps ``R^d -> R^d``, sends 0 to 0, and satisfies the
contraction contract ``E ||x - C(x)||^2 <= (1 - omega) ||x||^2`` for some
``omega in (0, 1]``.  The decoded payload is returned directly (no wire
serialization); the transmitted size is modelled by an idealized per-kind
bit count, with no headers or entropy coding.

Supported kinds:

* ``identity``   -- lossless, omega = 1.
* ``rand_k``     -- keep ``k`` uniformly chosen coordinates.  The default
  unbiased variant rescales by ``d/k``; it only contracts for ``k > d/2``
  (omega = 2 - d/k).  The plain variant (``rand_scaled=False``) keeps the
  coordinates unscaled and contracts with omega = k/d.
* ``top_k``      -- keep the ``k`` largest-magnitude coordinates, ties
  broken by lowest index; omega = k/d guaranteed.
* ``norm_sign``  -- ``(||x||_1 / d) * sgn(x)``; omega = 1/d guaranteed.
* ``quant2bit``  -- unbiased stochastic quantizer
  ``(||x||_inf / 2^(k2-1)) * sgn(x) o floor(2^(k2-1) |x| / ||x||_inf + w)``
  with ``w`` uniform per coordinate on [0, 1).  Its contraction factor has
  no clean closed form; ``QUANT_EMPIRICAL_OMEGA`` is a conservative
  measured value for Gaussian inputs at moderate dimension (d ~ 30).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Compressor",
    "CompressedMessage",
    "compress",
    "bit_cost",
    "contraction_estimate",
    "QUANT_EMPIRICAL_OMEGA",
]

KINDS = ("identity", "rand_k", "top_k", "norm_sign", "quant2bit")

# Measured on 10^5 standard-normal vectors at d=30 (k2=2): omega_hat ~ 0.85.
# Kept deliberately below the measurement so the statistical contract check
# has margin; it is an empirical figure, not a worst-case guarantee.
QUANT_EMPIRICAL_OMEGA = 0.75

FLOAT_BITS = 32  # idealized scalar width for uncompressed coordinates


@dataclass(frozen=True)
class Compressor:
    """Immutable descriptor of a compression operator."""

    kind: str
    k: int | None = None
    k2: int = 2
    scalar_bits: int = FLOAT_BITS
    rand_scaled: bool = True
    omega_nominal: float | None = None  # explicit override of nominal_omega

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown compressor kind {self.kind!r}")
        if self.kind in ("rand_k", "top_k"):
            if self.k is None or self.k < 1:
                raise ValueError(f"{self.kind} requires k >= 1")
        if self.kind == "quant2bit" and self.k2 < 1:
            raise ValueError("quant2bit requires k2 >= 1")

    def nominal_omega(self, d: int) -> float | None:
        """Documented contraction parameter at dimension ``d``, or None when
        no valid ``omega in (0, 1]`` is known for the configuration."""
        if self.omega_nominal is not None:
            return self.omega_nominal
        if self.kind == "identity":
            return 1.0
        if self.kind == "top_k":
            return min(self.k, d) / d
        if self.kind == "rand_k":
            if not self.rand_scaled:
                return min(self.k, d) / d
            omega = 2.0 - d / self.k
            return omega if omega > 0.0 else None
        if self.kind == "norm_sign":
            return 1.0 / d
        if self.kind == "quant2bit":
            return QUANT_EMPIRICAL_OMEGA if self.k2 == 2 else None
        return None


@dataclass(frozen=True)
class CompressedMessage:
    payload: np.ndarray  # decoded value C(x)
    bits: int


def bit_cost(c: Compressor, d: int) -> int:
    """Idealized transmitted bits for one message of dimension ``d``."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if c.kind == "identity":
        return FLOAT_BITS * d
    if c.kind in ("rand_k", "top_k"):
        index_bits = math.ceil(math.log2(d)) if d > 1 else 0
        return c.k * (FLOAT_BITS + index_bits)
    if c.kind == "norm_sign":
        return FLOAT_BITS + d
    if c.kind == "quant2bit":
        # one scalar for the infinity norm plus (level bits + sign) per coord
        return c.scalar_bits + d * (c.k2 + 1)
    raise ValueError(f"unknown compressor kind {c.kind!r}")


def compress(c: Compressor, x: np.ndarray, rng: np.random.Generator) -> CompressedMessage:
    """Apply the operator to one vector, drawing any randomness from ``rng``.

    A single call produces one realization; broadcast semantics (the same
    realization delivered to every neighbor) are the caller's job.  The
    zero vector short-circuits to a zero payload, which keeps ``C(0) = 0``
    exact and avoids the 0/0 in the quantizer's infinity-norm division.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    bits = bit_cost(c, d)
    if not np.any(x):
        return CompressedMessage(np.zeros(d), bits)

    if c.kind == "identity":
        return CompressedMessage(x.copy(), bits)

    if c.kind == "rand_k":
        k = min(c.k, d)
        idx = rng.choice(d, size=k, replace=False)
        payload = np.zeros(d)
        payload[idx] = x[idx] * (d / k if c.rand_scaled else 1.0)
        return CompressedMessage(payload, bits)

    if c.kind == "top_k":
        k = min(c.k, d)
        order = np.argsort(-np.abs(x), kind="stable")  # ties -> lowest index
        payload = np.zeros(d)
        payload[order[:k]] = x[order[:k]]
        return CompressedMessage(payload, bits)

    if c.kind == "norm_sign":
        payload = (np.sum(np.abs(x)) / d) * np.sign(x)
        return CompressedMessage(payload, bits)

    if c.kind == "quant2bit":
        scale = np.max(np.abs(x))
        half_levels = 2.0 ** (c.k2 - 1)
        dither = rng.uniform(0.0, 1.0, size=d)
        levels = np.floor(half_levels * np.abs(x) / scale + dither)
        payload = (scale / half_levels) * np.sign(x) * levels
        return CompressedMessage(payload, bits)

    raise ValueError(f"unknown compressor kind {c.kind!r}")


def contraction_estimate(
    c: Compressor, d: int, trials: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Monte Carlo estimate of the contraction parameter on standard-normal
    inputs.  Returns ``(omega_hat, standard_error)`` where
    ``omega_hat = 1 - mean ||x - C(x)||^2 / ||x||^2``."""
    if trials < 1000:
        raise ValueError(f"need at least 1000 trials, got {trials}")
    ratios = np.empty(trials)
    for i in range(trials):
        x = rng.standard_normal(d)
        payload = compress(c, x, rng).payload
        ratios[i] = np.sum((x - payload) ** 2) / np.sum(x**2)
    se = float(np.std(ratios, ddof=1) / math.sqrt(trials))
    return 1.0 - float(np.mean(ratios)), se
