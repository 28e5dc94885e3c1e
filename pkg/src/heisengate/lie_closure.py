"""Numerical dynamical-Lie-algebra closure for controllability checks.

Generators (Hermitian, traceless) are converted to their skew-Hermitian
counterparts iH and the real linear span is closed under commutation.
The basis is kept orthonormal under the Hilbert-Schmidt inner product
Re Tr(A^dag B) by vectorizing each matrix into a real vector (real and
imaginary parts stacked); a full span of traceless skew-Hermitian
operators has dimension n^2 - 1 with n the Hilbert-space dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import (
    PAULI_X,
    PAULI_Y,
    SpinChainSpec,
    build_control_generators,
    build_drift,
    pauli_on,
)

ADMISSION_TOL = 1e-10


@dataclass
class DlaReport:
    n_qubits: int
    generator_labels: list[str]
    dimension: int
    expected_dimension: int
    closure_iterations: int
    orthogonality_residual: float

    @property
    def complete(self) -> bool:
        return self.dimension == self.expected_dimension


def _vectorize(a: np.ndarray) -> np.ndarray:
    return np.concatenate([a.real.ravel(), a.imag.ravel()])


def _check_generator(h: np.ndarray, label: str) -> None:
    if np.max(np.abs(h - h.conj().T)) > 1e-10:
        raise ValueError(f"generator {label} is not Hermitian")
    if abs(np.trace(h)) > 1e-10:
        raise ValueError(f"generator {label} is not traceless")


def _orthogonalize(vec: np.ndarray, basis: np.ndarray) -> np.ndarray:
    # twice-is-enough Gram-Schmidt
    for _ in range(2):
        vec = vec - basis.T @ (basis @ vec)
    return vec


def dla_dimension(generators: list[np.ndarray], labels: list[str] | None = None,
                  admission_tol: float = ADMISSION_TOL) -> DlaReport:
    """Dimension of the real Lie algebra generated by {iH} under commutation."""
    if not generators:
        raise ValueError("need at least one generator")
    labels = labels or [f"g{k}" for k in range(len(generators))]
    for h, lab in zip(generators, labels):
        _check_generator(h, lab)
    dim_h = generators[0].shape[0]
    n_qubits = int(np.log2(dim_h))

    mats: list[np.ndarray] = []
    rows: list[np.ndarray] = []

    def admit(a: np.ndarray) -> bool:
        norm = np.linalg.norm(a)
        if norm < admission_tol:
            return False
        a = a / norm
        vec = _vectorize(a)
        if rows:
            vec = _orthogonalize(vec, np.array(rows))
        res = np.linalg.norm(vec)
        if res <= admission_tol:
            return False
        vec /= res
        # rebuild the orthonormalized matrix from the vector
        half = dim_h * dim_h
        m = (vec[:half] + 1j * vec[half:]).reshape(dim_h, dim_h)
        mats.append(m)
        rows.append(vec)
        return True

    for h in generators:
        admit(1j * h)

    sweeps = 0
    new_lo = 0
    ambient = dim_h * dim_h - 1
    while True:
        sweeps += 1
        new_hi = len(mats)
        admitted = False
        for a_idx in range(new_lo, new_hi):
            for b_idx in range(new_hi):
                a, b = mats[a_idx], mats[b_idx]
                comm = a @ b - b @ a
                if admit(comm):
                    admitted = True
                    if len(mats) >= ambient:
                        break
            if len(mats) >= ambient:
                break
        if len(mats) >= ambient or not admitted:
            break
        new_lo = new_hi

    basis = np.array(rows)
    gram = basis @ basis.T
    residual = float(np.max(np.abs(gram - np.eye(len(rows)))))
    return DlaReport(
        n_qubits=n_qubits,
        generator_labels=list(labels),
        dimension=len(mats),
        expected_dimension=dim_h**2 - 1,
        closure_iterations=sweeps,
        orthogonality_residual=residual,
    )


def chain_generators(spec: SpinChainSpec, controls: str = "xy") -> tuple[list[np.ndarray], list[str]]:
    """Drift plus the requested spin control operators (S^x, S^y on the
    actuator, leakage-weighted when the spec carries leakage)."""
    gens = [build_drift(spec)]
    labels = ["drift"]
    cx, cy = build_control_generators(spec)
    if "x" in controls:
        gens.append(cx)
        labels.append("Sx_actuator")
    if "y" in controls:
        gens.append(cy)
        labels.append("Sy_actuator")
    if not set(controls) <= {"x", "y"}:
        raise ValueError(f"controls must be drawn from 'xy', got {controls!r}")
    return gens, labels


def chain_dla(spec: SpinChainSpec, controls: str = "xy") -> DlaReport:
    gens, labels = chain_generators(spec, controls)
    return dla_dimension(gens, labels)


def verify_leakage_controllability(spec: SpinChainSpec) -> DlaReport:
    """DLA dimension with the leakage-weighted generators; complete
    controllability requires it to match the leakage-free value."""
    if spec.leakage is None:
        raise ValueError("spec carries no leakage parameter")
    return chain_dla(spec, "xy")


def single_spin_generator(n_qubits: int, qubit: int, axis: str) -> np.ndarray:
    sigma = {"x": PAULI_X, "y": PAULI_Y}[axis]
    return 0.5 * pauli_on(n_qubits, qubit, sigma)
