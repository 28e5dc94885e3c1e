"""Ideal low-pass filtering of piecewise-constant control fields.

Spectral truncation to |omega| <= omega0 of the alternating x/y schedule
has a closed form in terms of the sine integral: with
a_m(t) = Si[omega0 (m T - t)],

    h_x^f(t) = (1/pi) sum_n h_{x,n} [a_{2n-1}(t) - a_{2n-2}(t)],
    h_y^f(t) = (1/pi) sum_n h_{y,n} [a_{2n}(t)   - a_{2n-1}(t)].

The filtered propagator is integrated with a midpoint-sampled
piecewise-constant product formula (second order in the substep).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import SpinChainSpec
from .evolve import ControlSequence, SliceEvaluator, trace_fidelity
from .gates import TargetGate

_SERIES_CUT = 8.0
_SERIES_TERMS = 48
_CF_ITERS = 120


def _si_series(x: np.ndarray) -> np.ndarray:
    # Si(x) = sum_k (-1)^k x^(2k+1) / ((2k+1)(2k+1)!)
    out = np.zeros_like(x)
    term = x.copy()  # k = 0 factor x^(2k+1)/(2k+1)!
    for k in range(_SERIES_TERMS):
        n = 2 * k + 1
        out += term / n
        term *= -x * x / ((n + 1) * (n + 2))
    return out


def _e1_imag_cf(x: np.ndarray) -> np.ndarray:
    """Im E1(ix) for x > 0 via the modified Lentz continued fraction."""
    z = 1j * x
    tiny = 1e-300
    b = z + 1.0
    c = np.full_like(z, 1 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _CF_ITERS):
        a = -float(i * i)
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        h = h * (c * d)
    return np.imag(np.exp(-z) * h)


def si(x) -> np.ndarray | float:
    """Sine integral Si(x) = int_0^x sin(t)/t dt, odd, accurate to ~1e-12."""
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    out = np.empty_like(x_arr)
    ax = np.abs(x_arr)
    small = ax <= _SERIES_CUT
    if np.any(small):
        out[small] = _si_series(x_arr[small])
    large = ~small
    if np.any(large):
        out[large] = np.sign(x_arr[large]) * (np.pi / 2 + _e1_imag_cf(ax[large]))
    result = out[0] if scalar else out
    return float(result) if scalar else result


@dataclass(frozen=True)
class FilteredControl:
    """Band-limited continuous fields derived from a PWC schedule."""

    source: ControlSequence
    cutoff: float

    def __post_init__(self) -> None:
        if self.cutoff <= 0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")

    def fields(self, t) -> tuple[np.ndarray, np.ndarray]:
        """(h_x^f(t), h_y^f(t)) at the given times (defined for all real t)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        seq = self.source
        dt = seq.slice_duration
        n_half = seq.h_x.size
        m = np.arange(0, 2 * n_half + 1)
        # a[m, i] = Si(omega0 (m T - t_i))
        a = si(self.cutoff * (m[:, None] * dt - t[None, :]))
        hx = (seq.h_x[:, None] * (a[1::2] - a[0:-1:2])).sum(axis=0) / np.pi
        hy = (seq.h_y[:, None] * (a[2::2] - a[1::2])).sum(axis=0) / np.pi
        return hx, hy


def filter_fields(seq: ControlSequence, cutoff: float) -> FilteredControl:
    return FilteredControl(seq, float(cutoff))


def propagate_filtered(spec: SpinChainSpec, filtered: FilteredControl,
                       substeps_per_slice: int = 64) -> np.ndarray:
    """Propagator under the filtered fields on [0, t_f] with midpoint
    sampling and substep T/K."""
    if substeps_per_slice < 1:
        raise ValueError("substeps_per_slice must be >= 1")
    seq = filtered.source
    ev = SliceEvaluator(spec)
    n_steps = seq.n_pulses * substeps_per_slice
    dt = seq.slice_duration / substeps_per_slice
    t_mid = (np.arange(n_steps) + 0.5) * dt
    hx, hy = filtered.fields(t_mid)
    hs = (
        ev.h_drift[None, :, :]
        + hx[:, None, None] * ev.c_x
        + hy[:, None, None] * ev.c_y
    )
    lam, v = np.linalg.eigh(hs)
    us = (v * np.exp(-1j * lam * dt)[:, None, :]) @ np.conj(np.swapaxes(v, 1, 2))
    u = us[0]
    for k in range(1, n_steps):
        u = us[k] @ u
    return u


def propagate_filtered_converged(spec: SpinChainSpec, filtered: FilteredControl,
                                 gate: TargetGate | np.ndarray,
                                 substeps_per_slice: int = 64,
                                 fid_tol: float = 1e-8,
                                 max_substeps: int = 1024) -> tuple[np.ndarray, float, int]:
    """Double the substep count until the fidelity change drops below
    fid_tol; returns (propagator, fidelity, substeps used)."""
    k = substeps_per_slice
    u = propagate_filtered(spec, filtered, k)
    f = trace_fidelity(u, gate)
    while k < max_substeps:
        u2 = propagate_filtered(spec, filtered, 2 * k)
        f2 = trace_fidelity(u2, gate)
        if abs(f2 - f) < fid_tol:
            return u2, f2, 2 * k
        k *= 2
        u, f = u2, f2
    return u, f, k


@dataclass
class CutoffScan:
    cutoffs: list[float]
    errors: list[float]  # 1 - F_f per cutoff


def cutoff_scan(spec: SpinChainSpec, seq: ControlSequence, gate: TargetGate | np.ndarray,
                cutoffs, substeps_per_slice: int = 64) -> CutoffScan:
    """Filtered-field gate error as a function of the cutoff frequency."""
    errs = []
    cut_list = [float(w) for w in cutoffs]
    for w in cut_list:
        _, f, _ = propagate_filtered_converged(
            spec, filter_fields(seq, w), gate, substeps_per_slice
        )
        errs.append(1.0 - f)
    return CutoffScan(cut_list, errs)
