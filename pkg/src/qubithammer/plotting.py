"""SVG figures for reports, sweeps and calibration traces."""

from __future__ import annotations

import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import atomic_write_bytes  # noqa: E402

# Stable element ids so repeated renders are byte-identical.
matplotlib.rcParams["svg.hashsalt"] = "qubithammer"


def _save(fig, path: str | os.PathLike) -> None:
    import io

    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)
    atomic_write_bytes(path, buf.getvalue())


def plot_distributions(report: dict, path) -> None:
    """Grouped bars of ideal, baseline and attacked outcome frequencies."""
    def freqs(d):
        if d.get("counts"):
            return {k: v / d["shots"] for k, v in d["counts"].items()}
        return d["probs"]

    base, hit, ideal = freqs(report["baseline"]), freqs(report["attacked"]), report.get("ideal", {})
    keys = sorted(set(base) | set(hit) | set(ideal))
    x = np.arange(len(keys))
    w = 0.28
    fig, ax = plt.subplots(figsize=(max(4.0, 0.7 * len(keys) + 2), 3.2))
    ax.bar(x - w, [ideal.get(k, 0.0) for k in keys], w, label="ideal", color="#bbbbbb")
    ax.bar(x, [base.get(k, 0.0) for k in keys], w, label="baseline", color="#4477aa")
    ax.bar(x + w, [hit.get(k, 0.0) for k in keys], w, label="attacked", color="#cc6677")
    ax.set_xticks(x, keys)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("probability")
    sc = report.get("scenario", {})
    ax.set_title(f"{sc.get('label', '')} {report.get('benchmark', '')}: TV = {report['tv_distance']:.3f}")
    ax.legend(frameon=False, fontsize=8)
    _save(fig, path)


def plot_trend(xs: Sequence[float], tvs: Sequence[float], path, xlabel: str, threshold: float = 0.2,
               title: str = "") -> None:
    """Per-run TV scatter with the per-x mean and the success threshold."""
    xs = np.asarray(xs, dtype=float)
    tvs = np.asarray(tvs, dtype=float)
    ux = np.unique(xs)
    means = [tvs[xs == u].mean() for u in ux]
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.scatter(xs, tvs, s=12, color="#999999", label="runs")
    ax.plot(ux, means, "o-", color="#cc6677", label="mean")
    ax.axhline(threshold, ls="--", lw=1, color="k", label=f"success > {threshold:g}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("TV distance")
    ax.set_ylim(0, 1.05)
    if title:
        ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    _save(fig, path)


def plot_curve(x, y, path, xlabel: str, ylabel: str = "P(1)", fit=None, title: str = "") -> None:
    """Measured calibration trace with an optional fitted curve ``fit = (xf, yf)``."""
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.plot(x, y, ".", ms=4, color="#4477aa", label="measured")
    if fit is not None:
        ax.plot(fit[0], fit[1], "-", color="#cc6677", label="fit")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    _save(fig, path)
