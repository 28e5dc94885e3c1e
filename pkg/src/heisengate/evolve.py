"""Time evolution under alternating piecewise-constant x/y pulses.

The schedule applies an x pulse on [0, T), a y pulse on [T, 2T), and so on
through N_f slices of equal duration T; the chain propagator is the ordered
product of the slice exponentials with later slices on the left.  Matrix
exponentials go through the Hermitian eigendecomposition, which keeps the
propagator unitary to roundoff and lets the analytic fidelity gradient
reuse the slice eigenbases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import SpinChainSpec, build_control_generators, build_drift
from .gates import TargetGate, gate_matrix


class SequenceError(ValueError):
    """Raised for invalid control sequences."""


@dataclass(frozen=True)
class ControlSequence:
    """Alternating x/y piecewise-constant amplitude schedule.

    h_x[n] drives slice 2n (x axis) and h_y[n] slice 2n+1 (y axis), each of
    duration slice_duration; n_pulses = N_f is the total slice count.
    """

    slice_duration: float
    h_x: np.ndarray
    h_y: np.ndarray

    def __post_init__(self) -> None:
        hx = np.asarray(self.h_x, dtype=float)
        hy = np.asarray(self.h_y, dtype=float)
        object.__setattr__(self, "h_x", hx)
        object.__setattr__(self, "h_y", hy)
        if self.slice_duration <= 0:
            raise SequenceError(f"slice_duration must be > 0, got {self.slice_duration}")
        if hx.ndim != 1 or hx.shape != hy.shape or hx.size < 1:
            raise SequenceError("h_x and h_y must be equal-length 1-D arrays")
        if not (np.all(np.isfinite(hx)) and np.all(np.isfinite(hy))):
            raise SequenceError("amplitudes must be finite")

    @property
    def n_pulses(self) -> int:
        return 2 * self.h_x.size

    @property
    def total_time(self) -> float:
        return self.n_pulses * self.slice_duration

    def flat(self) -> np.ndarray:
        """Time-ordered amplitudes [h_x1, h_y1, h_x2, h_y2, ...]."""
        out = np.empty(self.n_pulses)
        out[0::2] = self.h_x
        out[1::2] = self.h_y
        return out

    @staticmethod
    def from_flat(flat: np.ndarray, slice_duration: float) -> "ControlSequence":
        flat = np.asarray(flat, dtype=float)
        if flat.size % 2 != 0:
            raise SequenceError("flat amplitude vector must have even length")
        return ControlSequence(slice_duration, flat[0::2].copy(), flat[1::2].copy())


def expm_hermitian(h: np.ndarray, t: float, herm_tol: float = 1e-10) -> np.ndarray:
    """exp(-i h t) for Hermitian h via spectral decomposition."""
    dev = np.max(np.abs(h - h.conj().T))
    if dev > herm_tol:
        raise ValueError(f"generator not Hermitian: max deviation {dev:.3e}")
    lam, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * lam * t)) @ v.conj().T


def trace_fidelity(u: np.ndarray, gate: TargetGate | np.ndarray) -> float:
    """F = 2^-N |Tr(U^dag U_gate)|, invariant under global phase."""
    ug = gate_matrix(gate) if isinstance(gate, TargetGate) else gate
    if u.shape != ug.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {ug.shape}")
    return abs(np.trace(u.conj().T @ ug)) / u.shape[0]


class SliceEvaluator:
    """Fast propagator / fidelity / gradient evaluation for a fixed chain.

    Builds the drift and control generators once, then evaluates whole
    schedules with one batched eigendecomposition over all slices.  The
    amplitude layout is the time-ordered flat vector of ControlSequence.
    """

    def __init__(self, spec: SpinChainSpec, target: TargetGate | np.ndarray | None = None):
        self.spec = spec
        self.h_drift = build_drift(spec)
        self.c_x, self.c_y = build_control_generators(spec)
        self.dim = spec.dim
        self.target = None
        if target is not None:
            self.target = gate_matrix(target) if isinstance(target, TargetGate) else target

    def _slice_hamiltonians(self, flat: np.ndarray) -> np.ndarray:
        m = flat.size
        hs = np.broadcast_to(self.h_drift, (m, self.dim, self.dim)).copy()
        hs[0::2] += flat[0::2, None, None] * self.c_x
        hs[1::2] += flat[1::2, None, None] * self.c_y
        return hs

    def slice_propagators(self, flat: np.ndarray, dt: float):
        """Per-slice unitaries plus the eigendata needed for gradients."""
        hs = self._slice_hamiltonians(flat)
        lam, v = np.linalg.eigh(hs)
        phase = np.exp(-1j * lam * dt)
        us = (v * phase[:, None, :]) @ np.conj(np.swapaxes(v, 1, 2))
        return us, lam, v, phase

    def propagator(self, seq: ControlSequence) -> np.ndarray:
        us, _, _, _ = self.slice_propagators(seq.flat(), seq.slice_duration)
        u = us[0]
        for k in range(1, us.shape[0]):
            u = us[k] @ u
        return u

    def fidelity(self, flat: np.ndarray, dt: float) -> float:
        if self.target is None:
            raise ValueError("no target gate configured")
        us, _, _, _ = self.slice_propagators(flat, dt)
        u = us[0]
        for k in range(1, us.shape[0]):
            u = us[k] @ u
        return abs(np.trace(u.conj().T @ self.target)) / self.dim

    def fidelity_and_gradient(self, flat: np.ndarray, dt: float) -> tuple[float, np.ndarray]:
        """Analytic dF/dh for every amplitude via the divided-difference
        kernel of each slice exponential, chained through the ordered
        product and the modulus of the trace overlap."""
        if self.target is None:
            raise ValueError("no target gate configured")
        m = flat.size
        us, lam, v, phase = self.slice_propagators(flat, dt)

        prefix = np.empty_like(us)  # prefix[k] = U_k ... U_1
        prefix[0] = us[0]
        for k in range(1, m):
            prefix[k] = us[k] @ prefix[k - 1]
        suffix = np.empty_like(us)  # suffix[k] = U_M ... U_{k+1}
        suffix[m - 1] = np.eye(self.dim, dtype=complex)
        for k in range(m - 2, -1, -1):
            suffix[k] = suffix[k + 1] @ us[k + 1]

        z = np.trace(prefix[m - 1].conj().T @ self.target)
        if abs(z) < 1e-12:
            raise FloatingPointError(
                "degenerate objective: |Tr(U^dag U_gate)| < 1e-12, gradient phase undefined"
            )

        # Divided-difference kernel K[j,k] = (e^{-i l_j dt} - e^{-i l_k dt}) / (l_j - l_k),
        # diagonal limit -i dt e^{-i l_j dt}.
        dlam = lam[:, :, None] - lam[:, None, :]  # l_j - l_k at [s, j, k]
        num = phase[:, :, None] - phase[:, None, :]  # e^{-i l_j dt} - e^{-i l_k dt}
        small = np.abs(dlam) < 1e-12
        kern = np.where(small, -1j * dt * phase[:, :, None],
                        num / np.where(small, 1.0, dlam))

        gens = np.empty_like(us)
        gens[0::2] = self.c_x
        gens[1::2] = self.c_y
        vh = np.conj(np.swapaxes(v, 1, 2))
        cbar = vh @ gens @ v
        dus = v @ (kern * cbar) @ vh  # dU_k/dh_k

        grad = np.empty(m)
        g = self.target
        for k in range(m):
            left = prefix[k - 1] if k > 0 else np.eye(self.dim, dtype=complex)
            # dz/dh_k = Tr[(S_k dU_k P_{k-1})^dag G]
            dz = np.trace(left.conj().T @ dus[k].conj().T @ suffix[k].conj().T @ g)
            grad[k] = np.real(np.conj(z) * dz) / (self.dim * abs(z))
        return abs(z) / self.dim, grad


def propagate(spec: SpinChainSpec, seq: ControlSequence) -> np.ndarray:
    """Full-schedule propagator for a chain spec (convenience wrapper)."""
    return SliceEvaluator(spec).propagator(seq)
