"""Command-line interface.

Subcommands::

    cmzo run --config FILE [--seed K] [--out DIR]
    cmzo sweep --config FILE --param NAME --values v1,v2,... [--out DIR]
    cmzo validate-params --config FILE

Exit codes: 0 success; 1 configuration error; 2 every seed diverged;
3 parameter validation failed (validate-params only).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .compression import contraction_estimate
from .config import ExperimentConfig, load_config
from .errors import CmzoError, ConfigError, DomainError
from .runner import build_setup, run_experiment, sweep
from .theorem import TheoremInputs, check_corollary1, check_theorem1, compute_constants

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2
EXIT_VALIDATION = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmzo")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a seeded experiment and write CSV traces")
    p_run.add_argument("--config", required=True, type=Path)
    p_run.add_argument("--seed", type=int, default=None, help="override the seed list")
    p_run.add_argument("--out", type=Path, default=Path("out"))

    p_sweep = sub.add_parser("sweep", help="run one experiment per parameter value")
    p_sweep.add_argument("--config", required=True, type=Path)
    p_sweep.add_argument("--param", required=True)
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--out", type=Path, default=Path("out"))

    p_val = sub.add_parser(
        "validate-params", help="print the constant ledger and per-condition results"
    )
    p_val.add_argument("--config", required=True, type=Path)
    return parser


def _resolve_omega(cfg: ExperimentConfig, setup) -> tuple[float, str]:
    if cfg.omega is not None:
        return cfg.omega, "config override"
    nominal = setup.algorithm.compressor.nominal_omega(cfg.d)
    if nominal is not None:
        return nominal, "nominal"
    est, se = contraction_estimate(
        setup.algorithm.compressor, cfg.d, 2000, np.random.default_rng(0)
    )
    return max(est - 3.0 * se, 1e-6), "empirical estimate"


def _theorem_inputs(cfg: ExperimentConfig) -> tuple[TheoremInputs, str]:
    setup = build_setup(cfg)
    omega, omega_source = _resolve_omega(cfg, setup)
    obj = setup.objectives[0]
    zo = setup.algorithm.zo
    inputs = TheoremInputs(
        delta=setup.mixing.spectral_gap,
        lam=setup.mixing.lambda_dev,
        omega=omega,
        beta=cfg.beta,
        eta=setup.algorithm.step_size(),
        gamma_g=cfg.gamma_g,
        gamma_x=cfg.gamma_x,
        d=cfg.d,
        sigma1=zo.sigma1(cfg.d),
        sigma2=zo.sigma2(cfg.d),
        l_f1=cfg.l_f1 if cfg.l_f1 is not None else obj.l_f1,
        l_f2=cfg.l_f2 if cfg.l_f2 is not None else obj.l_f2,
        gamma1=cfg.gamma1 if cfg.gamma1 is not None else obj.gamma1,
        noise_var=cfg.noise_var,
        n=cfg.n,
        horizon=cfg.horizon,
    )
    return inputs, omega_source


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seeds=(args.seed,))
    result = run_experiment(cfg, args.out)
    for seed, sr in result.per_seed.items():
        status = "ok" if sr.completed else f"diverged at t={sr.diverged_at}"
        print(f"seed {seed}: {status} ({len(sr.rows)} metric rows)")
    if result.all_diverged:
        print("error: every seed diverged", file=sys.stderr)
        return EXIT_DIVERGED
    print(f"aggregate over {result.n_aggregated} seed(s): {result.aggregate_path}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    results = sweep(cfg, args.param, values, args.out)
    status = EXIT_OK
    for value, res in results.items():
        if res.all_diverged:
            print(f"{args.param}={value}: every seed diverged", file=sys.stderr)
            status = EXIT_DIVERGED
        else:
            last = res.aggregate[-1]
            print(
                f"{args.param}={value}: final p_metric={last.p_metric:.6g} "
                f"bits={last.bits_cum}"
            )
    print(f"summary: {Path(args.out) / 'sweep_summary.csv'}")
    return status


def _cmd_validate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    inputs, omega_source = _theorem_inputs(cfg)
    print(f"omega = {inputs.omega:.6g} ({omega_source})")
    print(
        "constants conditional on supplied objective constants: "
        f"l_f1={inputs.l_f1:g} l_f2={inputs.l_f2:g} gamma1={inputs.gamma1:g}"
    )
    try:
        constants = compute_constants(inputs)
    except DomainError as exc:
        print(f"FAIL domain: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    for name, value in constants.as_dict().items():
        print(f"  {name} = {value:.6g}")
    report = check_theorem1(constants, inputs)
    for check in report.checks:
        print(f"{'PASS' if check.passed else 'FAIL'} {check.name}: {check.detail}")
    print(
        f"INFO contraction certificate max(l1,l2)+rho*l3 = {report.cert_value:.6g} "
        f"({'<' if report.cert_ok else '>='} 9/10)"
    )
    corollary = check_corollary1(inputs)
    for check in corollary.checks:
        print(
            f"{'PASS' if check.passed else 'FAIL'} corollary {check.name}: {check.detail}"
        )
    print(f"corollary gamma_g(T) = {corollary.gamma_g:.6g}")
    return EXIT_OK if report.passed else EXIT_VALIDATION


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "validate-params":
            return _cmd_validate(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CmzoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
