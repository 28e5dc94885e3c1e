"""Matplotlib figure rendering for CLI reports.

Figures are written to files next to the delimited output; no interactive
backend is ever required.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evolve import ControlSequence
from .lowpass import FilteredControl


def render_pulse_sequence(seq: ControlSequence, path: str | Path, title: str = "") -> Path:
    """Step plot of the piecewise-constant x and y amplitudes."""
    path = Path(path)
    dt = seq.slice_duration
    n_half = seq.h_x.size
    fig, (ax_x, ax_y) = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
    for ax, amps, offset, label, color in (
        (ax_x, seq.h_x, 0, r"$h_x$ [J]", "tab:blue"),
        (ax_y, seq.h_y, 1, r"$h_y$ [J]", "tab:orange"),
    ):
        edges = []
        vals = []
        for n in range(n_half):
            t0 = (2 * n + offset) * dt
            edges += [t0, t0 + dt]
            vals += [amps[n], amps[n]]
        ax.plot(edges, vals, color=color, drawstyle="default")
        ax.axhline(0, lw=0.5, color="0.6")
        ax.set_ylabel(label)
    ax_y.set_xlabel(r"$t$ [1/J]")
    if title:
        ax_x.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_filtered_fields(filtered: FilteredControl, path: str | Path,
                           points: int = 1000, title: str = "") -> Path:
    """Continuous filtered fields over [0, t_f], with the PWC source overlaid."""
    path = Path(path)
    seq = filtered.source
    t = np.linspace(0, seq.total_time, points)
    hx, hy = filtered.fields(t)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, hx, label=r"$h_x^f$", color="tab:blue")
    ax.plot(t, hy, label=r"$h_y^f$", color="tab:orange")
    ax.set_xlabel(r"$t$ [1/J]")
    ax.set_ylabel("field amplitude [J]")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_error_curve(x, errors, xlabel: str, path: str | Path, title: str = "") -> Path:
    """Gate error vs a scan axis on a log error scale."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.5, 4))
    errs = np.maximum(np.asarray(errors, dtype=float), 1e-16)
    ax.semilogy(x, errs, "o-", ms=4)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(r"gate error $1-F$")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_fidelity_curve(x, fidelities, xlabel: str, path: str | Path, title: str = "") -> Path:
    """Fidelity vs a scan axis on a linear scale (leakage benchmark style)."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.5, 4))
    ax.plot(x, fidelities, "o-", ms=4)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(r"fidelity $F$")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
