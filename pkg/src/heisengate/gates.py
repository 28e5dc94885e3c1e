"""Target unitaries: Toffoli, Fredkin, CNOT, eSWAP, and custom matrices.

Gates are embedded in the full chain Hilbert space with identity on
uninvolved qubits, using the same MSB-first qubit ordering as chains.py.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNITARITY_TOL = 1e-12


class GateError(ValueError):
    """Raised for ill-formed gate requests."""


@dataclass(frozen=True)
class TargetGate:
    """A named target unitary on an n_qubit chain.

    kind is one of 'toffoli', 'fredkin', 'cnot', 'eswap', 'custom'.
    For cnot, qubits = (control, target); for eswap, qubits = the swapped
    pair and theta the rotation angle.
    """

    kind: str
    n_qubits: int
    qubits: tuple[int, ...] = ()
    theta: float = 0.0
    matrix: np.ndarray | None = None

    def label(self) -> str:
        if self.kind == "cnot":
            return f"cnot{self.qubits}"
        if self.kind == "eswap":
            return f"eswap(theta={self.theta:g}, qubits={self.qubits})"
        return self.kind


def toffoli(n_qubits: int = 3) -> TargetGate:
    return TargetGate("toffoli", n_qubits)


def fredkin(n_qubits: int = 3) -> TargetGate:
    return TargetGate("fredkin", n_qubits)


def cnot(control: int = 2, target: int = 3, n_qubits: int = 3) -> TargetGate:
    return TargetGate("cnot", n_qubits, qubits=(control, target))


def eswap(theta: float, qubits: tuple[int, int] = (1, 2), n_qubits: int = 2) -> TargetGate:
    return TargetGate("eswap", n_qubits, qubits=qubits, theta=theta)


def custom(matrix: np.ndarray, n_qubits: int) -> TargetGate:
    return TargetGate("custom", n_qubits, matrix=np.asarray(matrix, dtype=complex))


def _check_indices(gate: TargetGate, count: int) -> tuple[int, ...]:
    q = gate.qubits
    if len(q) != count:
        raise GateError(f"{gate.kind} needs {count} qubit indices, got {q}")
    if len(set(q)) != len(q):
        raise GateError(f"{gate.kind} qubit indices must be distinct, got {q}")
    for i in q:
        if not (1 <= i <= gate.n_qubits):
            raise GateError(f"qubit index {i} outside chain of {gate.n_qubits}")
    return q


def _embed_permutation(n_qubits: int, mapper) -> np.ndarray:
    """Permutation unitary from a basis-index mapper (MSB-first bit order)."""
    dim = 2**n_qubits
    u = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        u[mapper(b), b] = 1.0
    return u


def _bit(b: int, qubit: int, n_qubits: int) -> int:
    return (b >> (n_qubits - qubit)) & 1


def _flip(b: int, qubit: int, n_qubits: int) -> int:
    return b ^ (1 << (n_qubits - qubit))


def _swap_bits(b: int, q1: int, q2: int, n_qubits: int) -> int:
    b1, b2 = _bit(b, q1, n_qubits), _bit(b, q2, n_qubits)
    if b1 != b2:
        b = _flip(_flip(b, q1, n_qubits), q2, n_qubits)
    return b


def gate_matrix(gate: TargetGate) -> np.ndarray:
    """Dense unitary for the target gate on the full chain Hilbert space."""
    n = gate.n_qubits
    if gate.kind == "toffoli":
        if n < 3:
            raise GateError("toffoli needs at least 3 qubits")

        def tof(b):
            if _bit(b, 1, n) and _bit(b, 2, n):
                return _flip(b, 3, n)
            return b

        return _embed_permutation(n, tof)

    if gate.kind == "fredkin":
        if n < 3:
            raise GateError("fredkin needs at least 3 qubits")

        def fred(b):
            if _bit(b, 1, n):
                return _swap_bits(b, 2, 3, n)
            return b

        return _embed_permutation(n, fred)

    if gate.kind == "cnot":
        c, t = _check_indices(gate, 2)

        def cx(b):
            if _bit(b, c, n):
                return _flip(b, t, n)
            return b

        return _embed_permutation(n, cx)

    if gate.kind == "eswap":
        q1, q2 = _check_indices(gate, 2)
        swap = _embed_permutation(n, lambda b: _swap_bits(b, q1, q2, n))
        return np.cos(gate.theta) * np.eye(2**n) + 1j * np.sin(gate.theta) * swap

    if gate.kind == "custom":
        if gate.matrix is None:
            raise GateError("custom gate needs a matrix")
        u = gate.matrix
        if u.shape != (2**n, 2**n):
            raise GateError(f"custom matrix shape {u.shape} != ({2**n}, {2**n})")
        dev = np.max(np.abs(u.conj().T @ u - np.eye(2**n)))
        if dev > UNITARITY_TOL:
            raise GateError(f"custom matrix not unitary (deviation {dev:.3e})")
        return u.copy()

    raise GateError(f"unknown gate kind {gate.kind!r}")


def is_palindromic(flat_amplitudes: np.ndarray, tol: float = 1e-6,
                   pairing: str = "flat") -> bool:
    """Whether a flattened pulse list equals its own reversal within tol.

    pairing='flat' mirrors slice k onto slice N_f+1-k regardless of axis;
    pairing='same-axis' compares the x amplitudes and y amplitudes
    separately, each reversed in time.
    """
    a = np.asarray(flat_amplitudes, dtype=float)
    if pairing == "flat":
        return bool(np.max(np.abs(a - a[::-1])) <= tol)
    if pairing == "same-axis":
        x, y = a[0::2], a[1::2]
        return bool(
            np.max(np.abs(x - x[::-1])) <= tol
            and np.max(np.abs(y - y[::-1])) <= tol
        )
    raise ValueError(f"unknown pairing {pairing!r}")
