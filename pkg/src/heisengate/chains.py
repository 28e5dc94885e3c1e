"""Drift and control operators for Heisenberg-coupled qubit chains.

All energies are in units of the exchange constant J (set to 1 internally)
and times in units of 1/J, with hbar = 1.  Operators are dense complex
matrices on the 2^N-dimensional Hilbert space.  Qubit 1 is the most
significant bit of the computational basis index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

HERMITICITY_TOL = 1e-12


class ChainSpecError(ValueError):
    """Raised for invalid chain specifications."""


@dataclass(frozen=True)
class Coupling:
    """Nearest-neighbor exchange anisotropy, stored as per-axis strengths.

    The isotropic chain is (1, 1, 1); an XXZ chain with anisotropy delta is
    (1, 1, delta).  Going through a single code path guarantees that the
    isotropic chain and its XXZ/XYZ specializations produce bitwise-identical
    matrices.
    """

    jx: float = 1.0
    jy: float = 1.0
    jz: float = 1.0

    @staticmethod
    def xxx() -> "Coupling":
        return Coupling(1.0, 1.0, 1.0)

    @staticmethod
    def xxz(delta: float) -> "Coupling":
        return Coupling(1.0, 1.0, float(delta))

    @staticmethod
    def xyz(jx: float, jy: float, jz: float) -> "Coupling":
        return Coupling(float(jx), float(jy), float(jz))


@dataclass(frozen=True)
class SpinChainSpec:
    """Chain geometry, coupling, global field, and control-leakage model.

    leakage is the decay rate mu of the control-field amplitude on qubit j,
    weight exp(-mu*(j - actuator)^2); None means a perfectly local control
    (the mu -> infinity limit).
    """

    n_qubits: int
    coupling: Coupling = field(default_factory=Coupling.xxx)
    global_field: float = 0.0
    leakage: float | None = None
    actuator: int = 1

    def __post_init__(self) -> None:
        if not (2 <= self.n_qubits <= 10):
            raise ChainSpecError(
                f"n_qubits must be in [2, 10], got {self.n_qubits}"
            )
        if not (1 <= self.actuator <= self.n_qubits):
            raise ChainSpecError(
                f"actuator {self.actuator} outside chain of {self.n_qubits} qubits"
            )
        if self.leakage is not None and self.leakage < 0:
            raise ChainSpecError(f"leakage must be >= 0, got {self.leakage}")

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


def pauli_on(n_qubits: int, qubit: int, sigma: np.ndarray) -> np.ndarray:
    """Single-qubit Pauli operator embedded in the full chain (1-based index)."""
    if not (1 <= qubit <= n_qubits):
        raise ChainSpecError(f"qubit index {qubit} out of range 1..{n_qubits}")
    op = np.eye(2 ** (qubit - 1), dtype=complex)
    op = np.kron(op, sigma)
    return np.kron(op, np.eye(2 ** (n_qubits - qubit), dtype=complex))


def build_drift(spec: SpinChainSpec) -> np.ndarray:
    """Nearest-neighbor exchange drift, open boundary, plus optional
    uniform z field of strength Omega entering as -(Omega/2) sum_i Z_i."""
    n = spec.n_qubits
    dim = spec.dim
    h = np.zeros((dim, dim), dtype=complex)
    c = spec.coupling
    for i in range(1, n):
        h += 0.25 * c.jx * (pauli_on(n, i, PAULI_X) @ pauli_on(n, i + 1, PAULI_X))
        h += 0.25 * c.jy * (pauli_on(n, i, PAULI_Y) @ pauli_on(n, i + 1, PAULI_Y))
        h += 0.25 * c.jz * (pauli_on(n, i, PAULI_Z) @ pauli_on(n, i + 1, PAULI_Z))
    if spec.global_field != 0.0:
        for i in range(1, n + 1):
            h -= 0.5 * spec.global_field * pauli_on(n, i, PAULI_Z)
    return h


def leakage_weights(spec: SpinChainSpec) -> np.ndarray:
    """Control-field amplitude on each qubit, normalized to 1 at the actuator."""
    j = np.arange(1, spec.n_qubits + 1)
    if spec.leakage is None:
        w = np.zeros(spec.n_qubits)
        w[spec.actuator - 1] = 1.0
        return w
    return np.exp(-spec.leakage * (j - spec.actuator) ** 2)


def build_control_generators(spec: SpinChainSpec) -> tuple[np.ndarray, np.ndarray]:
    """The operator pair (C_x, C_y) multiplying the field amplitudes h_x, h_y.

    Without leakage C_x = X_a/2 on the actuator qubit a; with leakage the
    half-Paulis on every qubit weighted by the Gaussian-in-distance decay.
    """
    n = spec.n_qubits
    w = leakage_weights(spec)
    cx = np.zeros((spec.dim, spec.dim), dtype=complex)
    cy = np.zeros_like(cx)
    for j in range(1, n + 1):
        if w[j - 1] == 0.0:
            continue
        cx += 0.5 * w[j - 1] * pauli_on(n, j, PAULI_X)
        cy += 0.5 * w[j - 1] * pauli_on(n, j, PAULI_Y)
    return cx, cy


def assert_hermitian(h: np.ndarray, tol: float = HERMITICITY_TOL) -> None:
    dev = np.max(np.abs(h - h.conj().T))
    if dev > tol:
        raise ValueError(f"matrix not Hermitian: max deviation {dev:.3e}")
