"""Deterministic matplotlib rendering of figure specs.

Byte-identical CSV in -> pixel-identical PNG/SVG out: fixed style, fixed
figure geometry, no timestamps or tool metadata in the output files.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import Table, read_table
from .spec import FigureSpec

STYLE = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "svg.hashsalt": "plotkit",
    "svg.fonttype": "path",
}

# metadata keys that would otherwise embed tool/version/date stamps
_PNG_METADATA = {"Software": None}
_SVG_METADATA = {"Date": None, "Creator": None}


def _save(fig, output_stem: str) -> list[str]:
    out = Path(output_stem)
    out.parent.mkdir(parents=True, exist_ok=True)
    written = []
    for ext, meta in (("png", _PNG_METADATA), ("svg", _SVG_METADATA)):
        target = out.with_suffix(f".{ext}")
        fig.savefig(target, metadata=meta)
        written.append(str(target))
    plt.close(fig)
    return written


def _axis_labels(ax, spec: FigureSpec, table: Table):
    if spec.kind == "timeseries":
        unit = f" ({table.time_unit})" if table.time_unit else ""
        xlabel = spec.xlabel or f"{spec.x}{unit}"
    elif spec.negate_x:
        xlabel = spec.xlabel or f"-{spec.x}"
    else:
        xlabel = spec.xlabel or spec.x
    ax.set_xlabel(xlabel)
    if spec.ylabel:
        ax.set_ylabel(spec.ylabel)
    if spec.title:
        ax.set_title(spec.title)


def plot_timeseries(spec: FigureSpec) -> list[str]:
    """Line plot of the selected columns against the time column."""
    table = read_table(spec.input)
    x = table.column(spec.x)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for name in spec.series:
            ax.plot(x, table.column(name), label=name)
        _axis_labels(ax, spec, table)
        if len(spec.series) > 1:
            ax.legend()
        fig.tight_layout()
        return _save(fig, spec.output)


def plot_scatter(spec: FigureSpec) -> list[str]:
    """Steady-state scatter; non-converged points get an open marker."""
    table = read_table(spec.input)
    x = table.column(spec.x)
    if spec.negate_x:
        x = -x
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for i, name in enumerate(spec.series):
            y = table.column(name)
            ok = table.converged_mask(name)
            color = f"C{i}"
            ax.scatter(x[ok], y[ok], s=36, color=color, label=name)
            if np.any(~ok):
                ax.scatter(x[~ok], y[~ok], s=42, facecolors="none",
                           edgecolors=color, marker="s",
                           label=f"{name} (not converged)")
        _axis_labels(ax, spec, table)
        ax.legend()
        fig.tight_layout()
        return _save(fig, spec.output)


def render(spec: FigureSpec) -> list[str]:
    if spec.kind == "timeseries":
        return plot_timeseries(spec)
    return plot_scatter(spec)
