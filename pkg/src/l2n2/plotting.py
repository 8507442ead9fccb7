"""Figure rendering for benchmark and calibration reports.

Everything here is headless (Agg backend) and writes PNG files next to
the delimited/JSON outputs; no interactive windows are ever opened.
Each function returns the path it wrote.
"""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .constants import EULER_GAMMA  # noqa: E402

__all__ = [
    "plot_bench_mpe",
    "plot_sphere_ladder",
    "plot_noise_sweep",
    "plot_calibration_drift",
    "plot_calibration_fit",
]

_DPI = 130


def _finish(fig, path: str | os.PathLike) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def _manifold_label(cell) -> str:
    base = f"{cell.manifold}(d={cell.d_true})"
    if cell.noise_sigma:
        base += f",s={cell.noise_sigma:g}"
    return base


def plot_bench_mpe(report, path: str | os.PathLike) -> str:
    """Grouped bars of mean MPE per manifold, one bar group per method/n."""
    cells = [c for c in report.cells if c.mean_mpe is not None]
    if not cells:
        raise ValueError("report has no successful cells to plot")
    manifolds = sorted({_manifold_label(c) for c in cells})
    series = sorted({f"{c.method}, n={c.n}" for c in cells})
    values = {s: [np.nan] * len(manifolds) for s in series}
    for c in cells:
        values[f"{c.method}, n={c.n}"][manifolds.index(_manifold_label(c))] = c.mean_mpe
    x = np.arange(len(manifolds))
    width = 0.8 / max(len(series), 1)
    fig, ax = plt.subplots(figsize=(max(6.0, 0.9 * len(manifolds) + 2), 4.2))
    for i, s in enumerate(series):
        ax.bar(x + (i - (len(series) - 1) / 2) * width, values[s], width, label=s)
    ax.set_xticks(x)
    ax.set_xticklabels(manifolds, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("mean MPE (%)")
    ax.set_title("Benchmark: mean percentage error by manifold")
    ax.legend(fontsize=8)
    ax.grid(axis="y", alpha=0.3)
    return _finish(fig, path)


def plot_sphere_ladder(report, path: str | os.PathLike) -> str:
    """Estimated vs true dimension with the identity diagonal."""
    cells = [c for c in report.cells if c.mean_d_hat is not None]
    if not cells:
        raise ValueError("report has no successful cells to plot")
    methods = sorted({c.method for c in cells})
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    lo = min(c.d_true for c in cells)
    hi = max(c.d_true for c in cells)
    ax.plot([lo - 1, hi + 1], [lo - 1, hi + 1], "k--", lw=1, label="true")
    for m in methods:
        pts = sorted((c.d_true, c.mean_d_hat, c.std_d_hat)
                     for c in cells if c.method == m)
        d = [p[0] for p in pts]
        ax.errorbar(d, [p[1] for p in pts], yerr=[p[2] for p in pts],
                    marker="o", capsize=3, label=m)
    ax.set_xlabel("true dimension")
    ax.set_ylabel("estimated dimension")
    ax.set_title("Hypersphere ladder")
    ax.legend()
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def plot_noise_sweep(report, path: str | os.PathLike) -> str:
    """Estimate drift under ambient Gaussian noise, one line per (d, method)."""
    cells = [c for c in report.cells if c.mean_d_hat is not None]
    if not cells:
        raise ValueError("report has no successful cells to plot")
    combos = sorted({(c.d_true, c.method) for c in cells})
    fig, ax = plt.subplots(figsize=(5.6, 4.4))
    for d_true, method in combos:
        pts = sorted((c.noise_sigma, c.mean_d_hat, c.std_d_hat)
                     for c in cells if c.d_true == d_true and c.method == method)
        ax.errorbar([p[0] for p in pts], [p[1] for p in pts],
                    yerr=[p[2] for p in pts], marker="o", capsize=3,
                    label=f"d={d_true}, {method}")
    for d_true in sorted({c.d_true for c in cells}):
        ax.axhline(d_true, color="gray", ls=":", lw=0.8)
    ax.set_xlabel("noise standard deviation per ambient coordinate")
    ax.set_ylabel("estimated dimension")
    ax.set_title("Noise sensitivity on embedded spheres")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def plot_calibration_drift(rows, path: str | os.PathLike) -> str:
    """Fitted slope/intercept versus sample size with their large-n limits.

    ``rows`` is the ``rows`` list of a calibration-study report: dicts
    with n, alpha_fit, beta_fit and their standard errors.
    """
    if not rows:
        raise ValueError("no calibration rows to plot")
    rows = sorted(rows, key=lambda r: r["n"])
    n = [r["n"] for r in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.6, 3.9))
    ax1.errorbar(n, [r["alpha_fit"] for r in rows],
                 yerr=[r["alpha_fit_stderr"] for r in rows],
                 marker="o", capsize=3, color="tab:blue")
    ax1.axhline(1.0, color="gray", ls="--", lw=1, label="limit 1")
    ax1.set_xscale("log")
    ax1.set_xlabel("sample size n")
    ax1.set_ylabel("fitted slope")
    ax1.legend(fontsize=8)
    ax1.grid(alpha=0.3)
    ax2.errorbar(n, [r["beta_fit"] for r in rows],
                 yerr=[r["beta_fit_stderr"] for r in rows],
                 marker="o", capsize=3, color="tab:orange")
    ax2.axhline(EULER_GAMMA, color="gray", ls="--", lw=1,
                label=f"limit {EULER_GAMMA:.4f}")
    ax2.set_xscale("log")
    ax2.set_xlabel("sample size n")
    ax2.set_ylabel("fitted intercept")
    ax2.legend(fontsize=8)
    ax2.grid(alpha=0.3)
    fig.suptitle("Calibration coefficients vs sample size", fontsize=11)
    return _finish(fig, path)


def plot_calibration_fit(entry, log_d: np.ndarray, lbar: np.ndarray,
                         path: str | os.PathLike) -> str:
    """Pooled (log d, Lbar) cells with the fitted regression line."""
    log_d = np.asarray(log_d, dtype=float)
    lbar = np.asarray(lbar, dtype=float)
    fig, ax = plt.subplots(figsize=(5.4, 4.2))
    ax.plot(log_d, lbar, ".", ms=4, alpha=0.45, label="(d, rep) cells")
    xs = np.linspace(log_d.min(), log_d.max(), 50)
    ax.plot(xs, entry.alpha_fit * xs + entry.beta_fit, "r-", lw=1.5,
            label=f"fit: {entry.alpha_fit:.4f} x + {entry.beta_fit:.4f}")
    ax.set_xlabel("log d")
    ax.set_ylabel("mean loglog-ratio statistic")
    ax.set_title(entry.key_string())
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _finish(fig, path)
