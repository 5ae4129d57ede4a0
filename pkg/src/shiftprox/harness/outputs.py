"""CSV traces, region grids and SVG plots."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..rates import normalized_rates, region_map

TRACE_HEADER = ("k", "e_k", "v_k", "ell_k", "F_xk", "phi_k")
REGION_HEADER = ("mu", "rho", "r_fbs", "r_fista0", "winner")


def fmt(x) -> str:
    """17 significant digits; empty for missing values."""
    if x is None:
        return ""
    x = float(x)
    if np.isnan(x):
        return ""
    return f"{x:.17g}"


def trace_csv_text(run, traces=None, metadata=None) -> str:
    """CSV text for one run: ``#`` metadata lines, header, one row per iterate.

    Columns that need the reference solution (``e_k``, ``v_k``, ``ell_k``,
    ``phi_k``) are left empty when it is unknown.
    """
    out = io.StringIO()
    for key, val in (metadata or {}).items():
        out.write(f"# {key}={val}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    K = len(run.values)
    lyap = run.lyapunov
    for k in range(K):
        row = [str(k)]
        if traces is not None:
            row += [fmt(traces.e[k]), fmt(traces.v[k]), fmt(traces.ell[k])]
        else:
            row += ["", "", ""]
        row.append(fmt(run.values[k]))
        row.append(fmt(lyap[k]) if lyap is not None else "")
        w.writerow(row)
    return out.getvalue()


def emit_csv(run, traces, path, metadata=None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(trace_csv_text(run, traces, metadata))
    return path


def read_trace_csv(path) -> tuple:
    """``(metadata, columns)`` from a trace CSV; empty fields become NaN."""
    meta, rows = {}, []
    with open(path, newline="") as fh:
        lines = [ln for ln in fh]
    body = []
    for ln in lines:
        if ln.startswith("#"):
            key, _, val = ln[1:].strip().partition("=")
            meta[key] = val
        else:
            body.append(ln)
    reader = csv.reader(body)
    header = next(reader)
    for r in reader:
        rows.append([float(x) if x != "" else np.nan for x in r])
    arr = np.array(rows, dtype=float).reshape(-1, len(header))
    return meta, {h: arr[:, i] for i, h in enumerate(header)}


def region_rows(mu_steps: int, rho_steps: int, mu_max: float = 1.0, rho_max: float = 5.0,
                remark_fbs: bool = False):
    if mu_steps < 2 or rho_steps < 2:
        raise ValueError("need at least 2 steps on each axis")
    mus = np.linspace(0.0, mu_max, mu_steps)
    rhos = np.linspace(0.0, rho_max, rho_steps)
    grid = region_map(mus, rhos, remark_fbs=remark_fbs)
    rows = []
    for i, mu in enumerate(mus):
        for j, rho in enumerate(rhos):
            r_fbs, r_fista = normalized_rates(mu, rho, remark_fbs)
            rows.append((mu, rho, r_fbs, r_fista, grid[i, j].value))
    return mus, rhos, grid, rows


def emit_region_map(mu_steps: int, rho_steps: int, path, plot_path=None,
                    remark_fbs: bool = False) -> Path:
    """Grid CSV ``mu,rho,r_fbs,r_fista0,winner`` over ``[0,1] x [0,5]`` (``L = 1``)."""
    mus, rhos, grid, rows = region_rows(mu_steps, rho_steps, remark_fbs=remark_fbs)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REGION_HEADER)
        for mu, rho, r_fbs, r_fista, winner in rows:
            w.writerow([fmt(mu), fmt(rho), fmt(r_fbs), fmt(r_fista), winner])
    if plot_path is not None:
        _region_plot(mus, rhos, grid, plot_path)
    return path


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "shiftprox"
    import matplotlib.pyplot as plt
    return plt


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def _region_plot(mus, rhos, grid, path):
    plt = _pyplot()
    code = {"FBS": 1.0, "FISTA0": -1.0, "TIE": 0.0}
    data = np.vectorize(lambda r: code[r.value])(grid).T
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.contourf(mus, rhos, data, levels=[-1.5, -0.5, 0.5, 1.5],
                colors=["#9ecae1", "#eeeeee", "#fdae6b"])
    ax.set_xlabel("mu / L")
    ax.set_ylabel("rho / L")
    ax.set_title("smaller rate bound: FBS (orange) vs FISTA, delta=0 (blue)")
    _save(fig, path)
    plt.close(fig)


@dataclass(frozen=True)
class PlotSummary:
    path: Path
    solid: int
    dashed: int


_DIAG_TITLES = {"e": "normalized error e_k", "v": "normalized value v_k",
                "ell": "normalized Lyapunov energy ell_k"}


def emit_plot(series, path, diagnostics=("e", "ell"), title=None) -> PlotSummary:
    """Log-scale traces, one panel per diagnostic, envelopes ``r^k`` dashed.

    ``series`` is a sequence of ``(label, NormalizedTraces, certificate_rate)``;
    the envelope of a run is drawn on the ``ell`` panel when its certificate
    rate is known. Lines carry SVG ids ``trace-<diag>-<i>`` and ``envelope-<i>``.
    """
    if not series:
        raise ValueError("need at least one trace")
    plt = _pyplot()
    fig, axes = plt.subplots(1, len(diagnostics), figsize=(5 * len(diagnostics), 4),
                             squeeze=False)
    solid = dashed = 0
    for ax, diag in zip(axes[0], diagnostics):
        for idx, (label, tr, rate) in enumerate(series):
            color = f"C{idx % 10}"
            y = np.asarray(getattr(tr, diag), dtype=float)
            y = np.where(y > 0, y, np.nan)
            ax.semilogy(np.arange(y.size), y, color=color, lw=1.2, label=label,
                        gid=f"trace-{diag}-{idx}")
            solid += 1
            if diag == "ell" and rate is not None:
                k = np.arange(y.size)
                ax.semilogy(k, rate ** k, color=color, lw=1.0, ls="--",
                            label=f"{label} bound r={rate:.4g}", gid=f"envelope-{idx}")
                dashed += 1
        ax.set_title(_DIAG_TITLES[diag])
        ax.set_xlabel("iteration k")
        floor = 1e-17
        ax.set_ylim(bottom=floor)
        ax.grid(True, which="major", alpha=0.3)
    axes[0][-1].legend(fontsize=7)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    p = _save(fig, path)
    plt.close(fig)
    return PlotSummary(p, solid, dashed)
