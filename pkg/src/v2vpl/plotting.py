"""Report figures.

Figures are drawn on the Agg canvas through the object API (no pyplot
state) and saved without PNG software metadata so repeated runs produce
identical files.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .estimation import FitResult, Trace
from .propagation import eval_median

LABELS = {"fi": "FI", "ci": "CI", "abg": "ABG", "3gpp": "3GPP", "proposed": "Proposed"}
STYLES = {"fi": ":", "ci": "--", "abg": "-.", "3gpp": (0, (5, 1, 1, 1)), "proposed": "-"}
DIRECTION_LABELS = {"moving_in": "Moving in", "moving_away": "Moving away"}

FONTSIZE = 9


def _save(fig: Figure, path) -> None:
    FigureCanvasAgg(fig)
    fig.savefig(path, format="png", dpi=120, metadata={"Software": None})


def plot_fits(panels: Sequence[tuple[Trace, Sequence[FitResult]]], path) -> None:
    """Measured path loss with every fitted median curve, one panel per trace."""
    n = len(panels)
    fig = Figure(figsize=(4.2 * n, 3.4), layout="constrained")
    axes = fig.subplots(1, n, squeeze=False)[0]
    for ax, (trace, fits) in zip(axes, panels):
        mask = trace.fit_mask()
        d, pl = trace.distance_m[mask], trace.pl_db[mask]
        ax.plot(d, pl, ".", ms=2, color="0.6", label="Measured")
        grid = np.linspace(d.min(), d.max(), 200)
        for fit in fits:
            ax.plot(grid, eval_median(fit.params, trace.frequency_ghz, grid),
                    linestyle=STYLES[fit.family], lw=1.3, label=LABELS[fit.family])
        speed = trace.relative_speed_mps * 3.6
        ax.set_title(f"{DIRECTION_LABELS[trace.direction.value]}, {speed:.0f} km/h",
                     fontsize=FONTSIZE + 1)
        ax.set_xlabel("Tx-Rx separation (m)")
        ax.set_ylabel("Path loss (dB)")
        ax.grid(alpha=0.3)
    axes[0].legend(fontsize=FONTSIZE - 1, loc="lower right")
    _save(fig, path)


def plot_crossing(curves: Sequence[dict], path) -> None:
    """Moving-in vs moving-away medians per speed.

    Each entry of ``curves`` holds ``speed_kmh``, ``crossover_m`` (or None)
    and ``series``: a mapping direction -> (distance, pl, extrapolated).
    Extrapolated stretches are dashed.
    """
    n = len(curves)
    fig = Figure(figsize=(4.2 * n, 3.4), layout="constrained")
    axes = fig.subplots(1, n, squeeze=False)[0]
    colors = {"moving_in": "tab:blue", "moving_away": "tab:red"}
    for ax, entry in zip(axes, curves):
        for direction, (d, pl, extra) in entry["series"].items():
            d, pl, extra = map(np.asarray, (d, pl, extra))
            ax.plot(np.where(extra, np.nan, d), pl, color=colors[direction],
                    label=DIRECTION_LABELS[direction])
            if extra.any():
                ax.plot(np.where(extra, d, np.nan), pl, "--", color=colors[direction],
                        label=f"{DIRECTION_LABELS[direction]} (extrapolated)")
        if entry.get("crossover_m") is not None:
            ax.axvline(entry["crossover_m"], color="0.3", lw=0.8, ls=":")
            ax.annotate(f"{entry['crossover_m']:.2f} m", (entry["crossover_m"], 0.05),
                        xycoords=("data", "axes fraction"), fontsize=FONTSIZE - 1)
        ax.set_title(f"{entry['speed_kmh']:g} km/h", fontsize=FONTSIZE + 1)
        ax.set_xlabel("Tx-Rx separation (m)")
        ax.set_ylabel("Path loss (dB)")
        ax.grid(alpha=0.3)
        ax.legend(fontsize=FONTSIZE - 1, loc="lower right")
    _save(fig, path)
