"""Matplotlib renderings of the report artifacts (written as PNG files)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .core import ScalarField
from .dynamics import TrajectorySet
from .interference import FringeReport


def save_intensity_map(
    frames: Sequence[ScalarField],
    v_y: float,
    path,
    trajectories: TrajectorySet | None = None,
) -> Path:
    """Screen-plane intensity map (x horizontal, y = v_y*t vertical)."""
    path = Path(path)
    grid = frames[0].grid
    matrix = np.stack([f.values for f in frames])
    y = v_y * np.array([f.time for f in frames])
    fig, ax = plt.subplots(figsize=(7, 5))
    extent = (grid.x_min, grid.x_max, float(y[0]), float(y[-1]) if len(y) > 1 else float(y[0]) + 1.0)
    ax.imshow(matrix, origin="lower", aspect="auto", extent=extent, cmap="inferno")
    if trajectories is not None:
        for i in range(len(trajectories.seeds)):
            ax.plot(trajectories.positions[i], trajectories.y, color="w", lw=0.6, alpha=0.8)
    ax.set_xlabel("x")
    ax.set_ylabel("y = v_y t")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_fringe_profile(
    field: ScalarField, report: FringeReport, nodes: np.ndarray | None, path
) -> Path:
    """Intensity profile with detected extrema and analytic node positions."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(field.grid.points, field.values, color="C0", lw=1.0)
    ax.plot(report.maxima, report.maxima_values, "^", color="C1", ms=5, label="maxima")
    ax.plot(report.minima, report.minima_values, "v", color="C3", ms=5, label="minima")
    if nodes is not None:
        for node in nodes:
            ax.axvline(node, color="k", ls=":", lw=0.7)
            ax.axvline(-node, color="k", ls=":", lw=0.7)
    ax.set_xlabel("x")
    ax.set_ylabel("intensity")
    ax.set_title(f"t = {field.time:g}, visibility = {report.visibility:.3f}")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_variance_growth(
    times: np.ndarray, variance: np.ndarray, analytic: np.ndarray, path
) -> Path:
    """Lattice variance growth against the analytic spreading law (log-log)."""
    path = Path(path)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.plot(times, variance, "o", ms=3, label="lattice")
    ax1.plot(times, analytic, "-", lw=1, label="analytic")
    ax1.set_xlabel("t")
    ax1.set_ylabel("variance")
    ax1.legend()
    positive = times > 0
    ax2.loglog(times[positive], variance[positive] - variance[0], "o", ms=3)
    ax2.loglog(times[positive], analytic[positive] - analytic[0], "-", lw=1)
    ax2.set_xlabel("t")
    ax2.set_ylabel("variance growth")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_field_overlay(
    fields: Sequence[ScalarField], labels: Sequence[str], path
) -> Path:
    """Several fields on one axis (e.g. lattice pipeline vs closed form)."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4))
    for field, label in zip(fields, labels):
        ax.plot(field.grid.points, field.values, lw=1.0, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("value")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
