"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 numerical divergence,
3 I/O error. The output root is ``--out-dir``, else ``$SHIFTPROX_OUT_DIR``,
else the current directory.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from ..core import DivergenceError, validate_problem
from ..quadratic import DegenerateSpectrumError, ShapeError, make_instance
from ..rates import (DomainError, fbs_rate, fbs_rate_remark, fista_coupling,
                     fista_delta_certificate, fista_inertia, fista_rate, fista_rho_rate, zeta)
from ..shift import contraction_factor, optimal_fbs_step
from . import config as config_mod
from .config import ConfigError
from .outputs import emit_region_map
from .runner import format_summary, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO = 0, 1, 2, 3
OUT_DIR_ENV = "SHIFTPROX_OUT_DIR"


def out_root(args) -> Path:
    if args.out_dir:
        return Path(args.out_dir)
    return Path(os.environ.get(OUT_DIR_ENV, "."))


def _say(args, text: str):
    if not args.quiet:
        print(text)


def _run_configs(args, configs) -> int:
    root = out_root(args)
    for cfg in configs:
        cfg = cfg.with_overrides(seed=args.seed, max_iters=args.max_iters)
        report = run_experiment(cfg, root)
        _say(args, format_summary(report))
    return EXIT_OK


def cmd_run(args):
    return _run_configs(args, config_mod.load(args.config))


def cmd_preset(args):
    return _run_configs(args, config_mod.preset(args.name))


def cmd_rates(args):
    mu, rho, L = args.mu, args.rho, args.L
    delta = rho if args.delta is None else args.delta
    cert = fista_delta_certificate(mu, rho, L, delta)
    gamma = optimal_fbs_step(mu, rho, L, 0.0)
    rows = [
        ("fbs_rate (L-mu)/(L+mu+2rho)", fbs_rate(mu, rho, L)),
        ("fbs_rate_remark (normalized)", fbs_rate_remark(mu / L, rho / L)),
        ("fbs optimal step 2/(L+mu)", gamma),
        ("fbs contraction at optimal step", contraction_factor(mu, rho, L, 0.0, gamma)),
        ("fista_rate (delta=0)", fista_rate(mu, rho, L)),
        ("fista_inertia (delta=0)", fista_inertia(mu, rho, L)),
        ("fista_coupling (delta=0)", fista_coupling(mu, rho, L)),
        (f"fista_delta rate (delta={delta:g})", cert.contraction),
        (f"fista_delta inertia (delta={delta:g})", cert.inertia_alpha),
        (f"fista_delta lyapunov weight", cert.lyapunov_weight),
        ("fista_rho rate 1-sqrt((mu+rho)/(L+rho))", fista_rho_rate(mu, rho, L)),
        ("zeta(mu/L, rho/L)", zeta(mu / L, rho / L)),
    ]
    if not args.quiet:
        for name, val in rows:
            print(f"{name:<42}{val:.17g}")
        if cert.degenerate:
            print("note: mu + delta = 0, no linear rate certified")
    return EXIT_OK


def cmd_region(args):
    root = out_root(args)
    steps = args.steps
    path = emit_region_map(steps, steps, root / "region.csv",
                           root / "region.svg" if args.plot else None,
                           remark_fbs=args.remark_fbs)
    _say(args, f"wrote {path}")
    return EXIT_OK


def cmd_validate(args):
    configs = config_mod.load(args.config)
    ok = True
    for cfg in configs:
        cfg = cfg.with_overrides(seed=args.seed)
        i = cfg.instance
        inst = make_instance(i.n, i.m, i.a, i.b, i.rho, i.seed)
        for spec in cfg.algorithms:
            d = spec.resolve_delta(inst.mu, inst.rho)
            if d is not None and not -inst.mu <= d <= inst.rho:
                raise ConfigError(f"delta={d} outside [-mu, rho]", f"{cfg.name}.{spec.label}")
        report = validate_problem(inst.to_problem(), samples=args.samples, seed=i.seed)
        _say(args, f"{cfg.name}: mu={inst.mu:.4g} L={inst.L:.6g} rho={inst.rho:g}")
        _say(args, report.format())
        ok &= report.passed
    return EXIT_OK if ok else EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override instance seed")
    common.add_argument("--max-iters", type=int, default=None, help="override iteration cap")
    common.add_argument("--out-dir", default=None, help=f"output root (default ${OUT_DIR_ENV} or .)")
    common.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="shiftprox", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run experiments from a config file")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", parents=[common], help="run a shipped experiment preset")
    p.add_argument("name", choices=config_mod.PRESETS)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("rates", parents=[common], help="print closed-form rates")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=None, help="shift (default rho)")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("region", parents=[common], help="FBS vs FISTA region grid")
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--plot", action="store_true", help="also write region.svg")
    p.add_argument("--remark-fbs", action="store_true",
                   help="rate FBS by (1-mu)/(1+mu+rho) instead of (1-mu)/(1+mu+2rho)")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("validate", parents=[common], help="check problem hypotheses")
    p.add_argument("config")
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, DomainError, ShapeError, DegenerateSpectrumError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # remaining bad numeric inputs, e.g. region --steps 1
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
