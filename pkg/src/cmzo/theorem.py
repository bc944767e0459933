"""Closed-form constant ledger and parameter-condition checks.

The convergence guarantee for the method holds under explicit conditions
on the consensus step ``gamma_x`` (an interval), the smoothing radius
``gamma_g`` (a lower bound), the horizon ``T`` (a lower bound) and the
step-size rule ``eta = (1 - beta) * sqrt(n / T)``.  This module evaluates
every constant in those conditions numerically and reports each check
independently.

Two layers of constants share some names in the source analysis and are
kept separate here:

* the *recursion layer* (``eps*_mix``, ``kappa1..3``, ``ell1..3``) bounds
  one step of the coupled consensus/compression error recursion, with the
  free splitting parameters hard-wired to ``alpha1 = gamma_x*delta/2``,
  ``alpha2 = 2/(gamma_x*delta)``, ``alpha6 = 4/omega`` and
  ``alpha3 = alpha4 = alpha5 = alpha7 = alpha8 = omega/4`` (the choices
  fixed by the statement of the guarantee, so they are not exposed);
* the *condition layer* (``eps0..eps9``, ``rho*``, ``m1..m4``, ``c1..c7``,
  ``gamma_lb1..3``) expresses the admissible parameter region as functions
  of ``rho = 16 eta^2 d^2 sigma2^2 L1^2 / gamma_g^2``.

``ell*_relaxed`` are the polynomial upper bounds on ``ell1..3`` (in terms
of ``gamma_x``, ``delta``, ``lambda``, ``omega``) that the interval
endpoints ``m1..m4`` are derived from; the exact ``ell*`` values are the
tighter ones and are what the contraction certificate reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .errors import DomainError

__all__ = [
    "TheoremInputs",
    "TheoremConstants",
    "ConditionCheck",
    "TheoremReport",
    "CorollaryReport",
    "compute_constants",
    "check_theorem1",
    "check_corollary1",
]

ETA_RULE_RTOL = 1e-9


@dataclass(frozen=True)
class TheoremInputs:
    """Everything the constant ledger depends on."""

    delta: float  # spectral gap of W
    lam: float  # max_i(1 - lambda_i(W))
    omega: float  # compressor contraction parameter
    beta: float  # momentum coefficient
    eta: float  # step size
    gamma_g: float  # smoothing radius
    gamma_x: float  # consensus step size
    d: int  # decision dimension
    sigma1: float  # perturbation coordinate second moment
    sigma2: float  # perturbation norm bound
    l_f1: float  # query Lipschitz constant
    l_f2: float  # Hessian bound
    gamma1: float  # sqrt bound on E[f^2]
    noise_var: float  # query-noise variance
    n: int  # agent count
    horizon: int  # T

    def __post_init__(self) -> None:
        pos = {
            "delta": self.delta,
            "lam": self.lam,
            "omega": self.omega,
            "eta": self.eta,
            "gamma_g": self.gamma_g,
            "gamma_x": self.gamma_x,
            "sigma1": self.sigma1,
            "sigma2": self.sigma2,
            "l_f1": self.l_f1,
        }
        for name, value in pos.items():
            if value <= 0:
                raise ValueError(f"{name} must be > 0, got {value}")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must be in [0, 1), got {self.beta}")
        if not self.omega <= 1.0:
            raise ValueError(f"omega must be in (0, 1], got {self.omega}")
        if not self.delta <= 1.0:
            raise ValueError(f"delta must be in (0, 1], got {self.delta}")
        if self.d < 1 or self.n < 1 or self.horizon < 1:
            raise ValueError("d, n, horizon must be >= 1")
        if self.l_f2 < 0 or self.gamma1 < 0 or self.noise_var < 0:
            raise ValueError("l_f2, gamma1, noise_var must be >= 0")


@dataclass(frozen=True)
class TheoremConstants:
    # recursion layer (alpha-substituted)
    eps1_mix: float
    eps2_mix: float
    eps3_mix: float
    eps4_mix: float
    kappa1: float
    kappa2: float
    kappa3: float
    ell1: float
    ell2: float
    ell3: float
    ell1_relaxed: float
    ell2_relaxed: float
    ell3_relaxed: float
    # condition layer
    rho: float
    eps0: float
    eps1_rho: float
    eps2_rho: float
    eps4_rho: float
    eps5: float
    eps6: float
    eps7: float
    eps8: float
    eps9: float
    rho0: float
    rho1: float
    rho2: float
    rho3: float
    kappa4: float
    kappa5: float
    a1: float
    a2: float
    b1: float
    b2: float
    m1: float
    m2: float
    m3: float
    m4_1: float
    m4_2: float
    m4: float
    gamma_lb1: float
    gamma_lb2: float
    gamma_lb3: float
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    c7: float
    contraction_cert: float  # max(ell1, ell2) + rho * ell3

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _recursion_layer(gamma_x: float, delta: float, lam: float, omega: float):
    s = gamma_x * delta
    gl2 = gamma_x**2 * lam**2
    lo = 1.0 + omega / 4.0  # 1 + alpha for alpha = omega/4
    hi = 1.0 + 4.0 / omega  # 1 + 1/alpha for alpha = omega/4 (also 1 + alpha6)
    resid = lo * (1.0 - omega)  # (1 + alpha3)(1 - omega)

    eps1 = (1.0 + s / 2.0) * (1.0 - s) ** 2
    eps2 = (1.0 + 2.0 / s) * gl2
    inner = resid * hi + hi  # (1+a3)(1-w)(1+1/a4) + (1+1/a3)
    eps3 = eps2 * (1.0 + s / 2.0) * inner
    eps4 = eps2 * (1.0 + s / 2.0) * resid * lo
    kappa1 = hi * gl2 * (hi * lo * inner + lo)
    kappa2 = hi * gl2 * hi * lo * resid * lo
    # last factor follows the condition-layer substitution (1 + omega/4);
    # the recursion statement's (1 + 1/alpha7) reading would not be
    # dominated by its own relaxed bound below
    kappa3 = hi * gl2 * hi * lo

    leak = resid * lo  # (1+a5)(1-w)(1+a8)
    ell1 = eps1 * (1.0 + s / 2.0) + kappa3
    ell2 = eps4 + leak + kappa2
    ell3 = eps3 + (1.0 + 2.0 / s) * (eps1 + eps2) + leak + kappa1

    ell1_rel = (1.0 - s / 2.0) ** 2 + 32.0 * gl2 / omega**2
    ell2_rel = 1.0 - omega / 4.0 + 3.0 * gamma_x * lam**2 / delta + 25.0 * gl2 / omega**2
    ell3_rel = (
        45.0 * gamma_x * lam**2 / (omega * delta)
        + (3.0 / s) * (1.0 + 3.0 * gamma_x * lam**2 / delta)
        + 1.0
        - omega / 4.0
        + (375.0 / omega**3 + 25.0 / (4.0 * omega)) * gl2
    )
    return (
        eps1, eps2, eps3, eps4, kappa1, kappa2, kappa3,
        ell1, ell2, ell3, ell1_rel, ell2_rel, ell3_rel,
    )


def compute_constants(inp: TheoremInputs) -> TheoremConstants:
    """Evaluate the full ledger; raise :class:`DomainError` where a formula
    requires a root of a quantity that turns out nonpositive."""
    delta, lam, omega = inp.delta, inp.lam, inp.omega
    beta, eta, gg, gx = inp.beta, inp.eta, inp.gamma_g, inp.gamma_x
    d, s2, l1, l2 = inp.d, inp.sigma2, inp.l_f1, inp.l_f2
    n = inp.n

    (
        eps1_mix, eps2_mix, eps3_mix, eps4_mix,
        kappa1, kappa2, kappa3,
        ell1, ell2, ell3, ell1_rel, ell2_rel, ell3_rel,
    ) = _recursion_layer(gx, delta, lam, omega)

    rho = 16.0 * eta**2 * d**2 * s2**2 * l1**2 / gg**2
    eps0 = 1.0 - omega / 4.0 + 9.0 * lam**2 / delta**2
    eps1_rho = delta - 45.0 * rho * lam**2 / (omega * delta)
    eps2_rho = 4.0 / 5.0 - rho * eps0
    eps4_rho = 4.0 / 5.0 + omega / 4.0 - rho * eps0
    eps5 = (2.0 / 5.0 + omega / 4.0) / (
        2.0 * (3.0 * lam**2 / delta + 18.0 * lam**2 / (omega * delta * eps0))
    )
    eps6 = delta**3 * omega**3 + 128.0 * delta * omega * lam**2
    rho0 = 2.0 / (5.0 * eps0)
    rho2 = eps5**3 * eps6 / (12.0 * omega**3)
    eps7 = eps6 + 1500.0 * rho0 * delta * lam**2 + 25.0 * omega**2 * rho0 * delta * lam**2
    eps8 = (12.0 * omega**3 / eps7) ** (1.0 / 3.0)
    rho3 = (delta * eps8 / 30.0) ** 1.5
    eps9 = eps6 + 1500.0 * rho * delta * lam**2 + 25.0 * omega**2 * rho * delta * lam**2
    kappa5 = 100.0 * delta * omega * lam**2 + 1500.0 * rho * delta * lam**2 + 25.0 * delta * omega**2 * rho * lam**2
    kappa4 = 4.0 * n * d**2 * s2**2 * (l1**2 * gg**2 * s2**2 + inp.gamma1**2 + inp.noise_var) / gg**2
    rho1 = (10.0 / 9.0) * (max(ell1, ell2) + ell3 * rho)

    a1 = -delta + 45.0 * rho * lam**2 / (omega * delta)
    a2 = -4.0 / 5.0 + rho * eps0
    b1 = 3.0 * lam**2 / delta + 45.0 * rho * lam**2 / (omega * delta)
    b2 = a2 - omega / 4.0

    if a1 >= 0.0:
        raise DomainError(
            "a1 < 0",
            f"a1 = -delta + 45*rho*lam^2/(omega*delta) = {a1} >= 0; "
            "rho too large for the step-size interval to exist",
        )
    disc_a = a2**2 - 24.0 * a1 * rho / delta
    if disc_a < 0.0:
        raise DomainError("a2^2 - 24*a1*rho/delta >= 0", f"discriminant {disc_a} < 0")
    m1 = (a2 + math.sqrt(disc_a)) / (-2.0 * a1)
    m2 = (12.0 * rho * omega**3 / eps9) ** (1.0 / 3.0)
    disc_b = b2**2 - 24.0 * b1 * rho / delta
    if disc_b < 0.0:
        raise DomainError("b2^2 - 24*b1*rho/delta >= 0", f"discriminant {disc_b} < 0")
    m3 = (-b2 - math.sqrt(disc_b)) / (2.0 * b1)
    m4_1 = (-b2 + math.sqrt(disc_b)) / (2.0 * b1)
    m4_2 = (12.0 * rho * omega**3 / kappa5) ** (1.0 / 3.0)
    m4 = min(m4_1, m4_2)

    base = eta * d * s2 * l1
    gamma_lb1 = math.sqrt(40.0 * eps0) * base
    gamma_lb2 = math.sqrt(192.0 * omega**3 / (eps5**3 * eps6)) * base
    gamma_lb3 = 4.0 * base / (delta * eps8 / 30.0) ** 0.75

    one_minus_b = 1.0 - beta
    c1 = 5.0 * n * d * l2 * inp.sigma1 * beta**4 / one_minus_b
    c2 = 4.0 * d**2 * inp.sigma1**2 * l2**4 / n
    c3 = 320.0 * n * one_minus_b**2 * eps0 * d**2 * s2**2 * l1**2 / ((16.0 + 5.0 * omega) * gg**2)
    c4 = 720.0 * n * lam**2 * d**2 * s2**2 * l1**2 * one_minus_b**2 / (gg**2 * omega * delta**2)
    c5 = 40.0 * n * one_minus_b**2 * eps0 * d**2 * s2**2 * l1**2 / gg**2
    c6 = 192.0 * omega**3 * n * d**2 * s2**2 * l1**2 * one_minus_b / (gg**2 * eps5**3 * eps6)
    c7 = 16.0 * n * one_minus_b**2 * d**2 * s2**2 * l1**2 / (gg**2 * (delta * eps8 / 30.0) ** 1.5)

    return TheoremConstants(
        eps1_mix=eps1_mix, eps2_mix=eps2_mix, eps3_mix=eps3_mix, eps4_mix=eps4_mix,
        kappa1=kappa1, kappa2=kappa2, kappa3=kappa3,
        ell1=ell1, ell2=ell2, ell3=ell3,
        ell1_relaxed=ell1_rel, ell2_relaxed=ell2_rel, ell3_relaxed=ell3_rel,
        rho=rho, eps0=eps0, eps1_rho=eps1_rho, eps2_rho=eps2_rho, eps4_rho=eps4_rho,
        eps5=eps5, eps6=eps6, eps7=eps7, eps8=eps8, eps9=eps9,
        rho0=rho0, rho1=rho1, rho2=rho2, rho3=rho3,
        kappa4=kappa4, kappa5=kappa5,
        a1=a1, a2=a2, b1=b1, b2=b2,
        m1=m1, m2=m2, m3=m3, m4_1=m4_1, m4_2=m4_2, m4=m4,
        gamma_lb1=gamma_lb1, gamma_lb2=gamma_lb2, gamma_lb3=gamma_lb3,
        c1=c1, c2=c2, c3=c3, c4=c4, c5=c5, c6=c6, c7=c7,
        contraction_cert=max(ell1, ell2) + rho * ell3,
    )


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class TheoremReport:
    checks: tuple[ConditionCheck, ...]
    constants: TheoremConstants
    cert_value: float
    cert_ok: bool  # informational: max(ell1, ell2) + rho*ell3 < 9/10

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_names(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]


def check_theorem1(constants: TheoremConstants, inp: TheoremInputs) -> TheoremReport:
    """Check every hypothesis of the fixed-step guarantee independently."""
    lower = max(constants.m1, constants.m3)
    upper = min(constants.m2, constants.m4)
    gamma_lb = max(constants.gamma_lb1, constants.gamma_lb2, constants.gamma_lb3)
    t_lb = max(
        constants.c1, constants.c2, constants.c3, constants.c4,
        constants.c5, constants.c6, constants.c7,
    )
    eta_target = (1.0 - inp.beta) * math.sqrt(inp.n / inp.horizon)
    eta_ok = math.isclose(inp.eta, eta_target, rel_tol=ETA_RULE_RTOL, abs_tol=0.0)

    checks = (
        ConditionCheck(
            "gamma_x_lower",
            inp.gamma_x > lower,
            f"gamma_x={inp.gamma_x:g} vs max(m1,m3)={lower:g}",
        ),
        ConditionCheck(
            "gamma_x_upper",
            inp.gamma_x < upper,
            f"gamma_x={inp.gamma_x:g} vs min(m2,m4)={upper:g}",
        ),
        ConditionCheck(
            "gamma_x_interval_nonempty",
            lower < upper,
            f"interval ({lower:g}, {upper:g})",
        ),
        ConditionCheck(
            "gamma_g_lower",
            inp.gamma_g >= gamma_lb,
            f"gamma_g={inp.gamma_g:g} vs max lower bound {gamma_lb:g}",
        ),
        ConditionCheck(
            "T_lower",
            inp.horizon >= t_lb,
            f"T={inp.horizon} vs max(c1..c7)={t_lb:g}",
        ),
        ConditionCheck(
            "eta_rule",
            eta_ok,
            f"eta={inp.eta:g} vs (1-beta)*sqrt(n/T)={eta_target:g}",
        ),
    )
    cert = constants.contraction_cert
    return TheoremReport(checks=checks, constants=constants, cert_value=cert, cert_ok=cert < 0.9)


@dataclass(frozen=True)
class CorollaryReport:
    gamma_g: float  # T^(-1/8)
    thresholds: dict[str, float]
    checks: tuple[ConditionCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def check_corollary1(inp: TheoremInputs) -> CorollaryReport:
    """Horizon thresholds under the schedule ``gamma_g = T^(-1/8)``.

    ``c1`` and ``c2`` are unchanged; the remaining thresholds absorb the
    schedule into 4/3-power forms that no longer involve ``gamma_g``.
    """
    if inp.horizon < 2:
        raise ValueError("corollary check needs T >= 2")
    delta, lam, omega, beta = inp.delta, inp.lam, inp.omega, inp.beta
    d, s2, l1 = inp.d, inp.sigma2, inp.l_f1
    n = inp.n
    one_minus_b = 1.0 - beta

    eps0 = 1.0 - omega / 4.0 + 9.0 * lam**2 / delta**2
    eps5 = (2.0 / 5.0 + omega / 4.0) / (
        2.0 * (3.0 * lam**2 / delta + 18.0 * lam**2 / (omega * delta * eps0))
    )
    eps6 = delta**3 * omega**3 + 128.0 * delta * omega * lam**2
    rho0 = 2.0 / (5.0 * eps0)
    eps7 = eps6 + 1500.0 * rho0 * delta * lam**2 + 25.0 * omega**2 * rho0 * delta * lam**2
    eps8 = (12.0 * omega**3 / eps7) ** (1.0 / 3.0)

    core = n * one_minus_b**2 * d**2 * s2**2 * l1**2
    thresholds = {
        "c1": 5.0 * n * d * inp.l_f2 * inp.sigma1 * beta**4 / one_minus_b,
        "c2": 4.0 * d**2 * inp.sigma1**2 * inp.l_f2**4 / n,
        "c3_tilde": (320.0 * core * eps0 / (16.0 + 5.0 * omega)) ** (4.0 / 3.0),
        "c4_tilde": (720.0 * core * lam**2 / (omega * delta**2)) ** (4.0 / 3.0),
        "c5_tilde": (40.0 * core * eps0) ** (4.0 / 3.0),
        "c6_tilde": (192.0 * core * omega**3 / (eps5**3 * eps6)) ** (4.0 / 3.0),
        "c7_tilde": (16.0 * core / (delta * eps8 / 30.0) ** 1.5) ** (4.0 / 3.0),
    }
    checks = tuple(
        ConditionCheck(name, inp.horizon >= value, f"T={inp.horizon} vs {value:g}")
        for name, value in thresholds.items()
    )
    return CorollaryReport(
        gamma_g=inp.horizon ** (-1.0 / 8.0), thresholds=thresholds, checks=checks
    )
