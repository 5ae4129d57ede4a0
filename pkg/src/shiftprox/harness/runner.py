"""Run configured experiments and collect their diagnostics."""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..core import Algorithm
from ..lyapunov import NormalizedTraces, empirical_rate, floor_index, normalized_traces
from ..quadratic import make_instance
from ..solvers import SolverConfig, solve
from .config import ConfigError, ExperimentConfig
from .outputs import emit_csv, emit_plot, emit_region_map, fmt

log = logging.getLogger(__name__)

RATE_WINDOW = 20


@dataclass
class RunReport:
    label: str
    algorithm: Algorithm
    delta: Optional[float]
    gamma: float
    alpha: float
    certificate: Optional[float]
    empirical_rate: Optional[float]
    traces: NormalizedTraces
    iterations: int
    csv_path: Optional[Path] = None
    run: object = None

    def ell_at(self, k: int) -> float:
        return float(self.traces.ell[min(k, self.traces.ell.size - 1)])


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    mu: float
    L: float
    rho: float
    runs: list = field(default_factory=list)
    horizon: int = 0
    seconds: float = 0.0
    plot_path: Optional[Path] = None

    def by_label(self, label: str) -> RunReport:
        for r in self.runs:
            if r.label == label:
                return r
        raise KeyError(label)

    def best(self) -> Optional[RunReport]:
        """The run dominating every other one, if any (see :func:`dominates`)."""
        for r in self.runs:
            if all(dominates(r, o) for o in self.runs if o is not r):
                return r
        return None


def comparison_horizon(traces) -> int:
    """Last iteration at which every energy trace is still above the rounding floor.

    Energies are compared there rather than at the final iterate, where the
    fastest runs sit at machine precision and their order is noise.
    """
    ends = []
    for tr in traces:
        ell = tr.ell
        if ell.size and not np.isnan(ell[0]):
            ends.append(floor_index(ell) - 1)
    return max(min(ends), 0) if ends else 0


def dominates(a: RunReport, b: RunReport) -> bool:
    """True when ``a`` ends with the smaller normalized energy.

    "End" is the last iteration where both traces are above the floor, so a
    fast run is not penalized for reaching machine precision first.
    """
    k = comparison_horizon([a.traces, b.traces])
    return a.ell_at(k) < b.ell_at(k)


def _metadata(cfg: ExperimentConfig, inst, rep: RunReport) -> dict:
    i = cfg.instance
    return {
        "experiment": cfg.name,
        "seed": i.seed, "n": i.n, "m": i.m, "a": fmt(i.a), "b": fmt(i.b), "rho": fmt(i.rho),
        "L": fmt(inst.L), "mu": fmt(inst.mu),
        "algorithm": rep.algorithm.value, "label": rep.label,
        "delta": fmt(rep.delta), "gamma": fmt(rep.gamma), "alpha": fmt(rep.alpha),
        "certificate_rate": fmt(rep.certificate),
        "max_iters": cfg.max_iters,
    }


def _safe_name(label: str) -> str:
    return label.replace("/", "_").replace("=", "_").replace(" ", "")


def run_experiment(cfg: ExperimentConfig, out_root=None, write: bool = True,
                   keep_runs: bool = False) -> ExperimentReport:
    """Build the instance, run every algorithm, and write CSVs, summary and plot."""
    t0 = time.perf_counter()
    i = cfg.instance
    inst = make_instance(i.n, i.m, i.a, i.b, i.rho, i.seed)
    p = inst.to_problem()
    report = ExperimentReport(cfg, mu=inst.mu, L=inst.L, rho=inst.rho)
    out_dir = Path(out_root or ".") / cfg.outputs.csv_path
    for spec in cfg.algorithms:
        delta = spec.resolve_delta(inst.mu, inst.rho)
        if delta is not None and not -inst.mu <= delta <= inst.rho:
            raise ConfigError(f"delta={delta} outside [-mu, rho] = [{-inst.mu}, {inst.rho}]",
                              f"{cfg.name}.{spec.label}")
        ov = dict(spec.overrides)
        ov.setdefault("store_every", cfg.max_iters)
        scfg = SolverConfig(spec.algorithm, max_iters=cfg.max_iters, delta=delta, **ov)
        run = solve(p, scfg)
        tr = normalized_traces(run, p)
        rate = None
        if run.lyapunov is not None:
            try:
                rate = empirical_rate(tr.ell, RATE_WINDOW)
            except ValueError:
                rate = None
        rep = RunReport(spec.label, spec.algorithm, delta, run.gamma, run.alpha,
                        run.certificate_rate, rate, tr, run.iterations,
                        run=run if keep_runs else None)
        if write:
            rep.csv_path = emit_csv(run, tr, out_dir / f"{_safe_name(spec.label)}.csv",
                                    _metadata(cfg, inst, rep))
        report.runs.append(rep)
        log.info("%s %s: certificate=%s empirical=%s", cfg.name, spec.label,
                 rep.certificate, rep.empirical_rate)
    report.horizon = comparison_horizon(r.traces for r in report.runs)
    if write:
        write_summary(report, out_dir / "summary.csv")
        if cfg.outputs.plot:
            path = cfg.outputs.plot_path or (out_dir / "traces.svg")
            if cfg.outputs.plot_path is not None:
                path = Path(out_root or ".") / path
            series = [(r.label, r.traces, r.certificate) for r in report.runs]
            title = f"{cfg.name}: n={i.n}, rho={i.rho:g}, mu={inst.mu:.3g}"
            report.plot_path = emit_plot(series, path, cfg.outputs.diagnostics, title).path
        if cfg.outputs.region_grid:
            steps = int(cfg.outputs.region_grid)
            emit_region_map(steps, steps, out_dir / "region.csv",
                            out_dir / "region.svg" if cfg.outputs.plot else None)
    report.seconds = time.perf_counter() - t0
    return report


SUMMARY_HEADER = ("experiment", "label", "algorithm", "delta", "gamma", "alpha",
                  "certificate_rate", "empirical_rate", "iterations", "horizon",
                  "ell_at_horizon", "ell_final", "mu", "L", "rho")


def summary_rows(report: ExperimentReport):
    for r in report.runs:
        yield (report.config.name, r.label, r.algorithm.value, fmt(r.delta), fmt(r.gamma),
               fmt(r.alpha), fmt(r.certificate), fmt(r.empirical_rate), r.iterations,
               report.horizon, fmt(r.ell_at(report.horizon)), fmt(r.traces.ell[-1]),
               fmt(report.mu), fmt(report.L), fmt(report.rho))


def write_summary(report: ExperimentReport, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        w.writerows(summary_rows(report))
    return path


def format_summary(report: ExperimentReport) -> str:
    cfg = report.config
    lines = [f"{cfg.name}: n={cfg.instance.n} m={cfg.instance.m} rho={report.rho:g} "
             f"mu={report.mu:.4g} L={report.L:.6g} horizon={report.horizon} "
             f"({report.seconds:.1f}s)",
             f"  {'run':<22}{'certificate':>12}{'empirical':>12}{'ell@horizon':>14}"]
    best = report.best()
    best = best.label if best is not None else None
    for r in report.runs:
        cert = "-" if r.certificate is None else f"{r.certificate:.5f}"
        emp = "-" if r.empirical_rate is None else f"{r.empirical_rate:.5f}"
        mark = "  *" if r.label == best else ""
        lines.append(f"  {r.label:<22}{cert:>12}{emp:>12}{r.ell_at(report.horizon):>14.3e}{mark}")
    return "\n".join(lines)
