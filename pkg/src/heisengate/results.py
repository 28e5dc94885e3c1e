"""Result-file persistence: versioned JSON with replayable sequences.

Amplitudes are stored as full-precision decimal doubles, so re-evaluating
a stored sequence against its stored spec and gate reproduces the stored
fidelity exactly (to 1e-12).  Timestamps live in a separate key excluded
from determinism comparisons.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .chains import Coupling, SpinChainSpec
from .evolve import ControlSequence, SliceEvaluator
from .gates import TargetGate
from .optimize import OptimizationReport, OptimizerConfig

SCHEMA_VERSION = 1


class ResultFileError(ValueError):
    """Raised for missing or corrupt result files."""


def spec_to_dict(spec: SpinChainSpec) -> dict:
    return {
        "n_qubits": spec.n_qubits,
        "coupling": {"jx": spec.coupling.jx, "jy": spec.coupling.jy, "jz": spec.coupling.jz},
        "global_field": spec.global_field,
        "leakage": spec.leakage,
        "actuator": spec.actuator,
    }


def spec_from_dict(d: dict) -> SpinChainSpec:
    c = d.get("coupling", {})
    return SpinChainSpec(
        n_qubits=int(d["n_qubits"]),
        coupling=Coupling(float(c.get("jx", 1)), float(c.get("jy", 1)), float(c.get("jz", 1))),
        global_field=float(d.get("global_field", 0.0)),
        leakage=None if d.get("leakage") is None else float(d["leakage"]),
        actuator=int(d.get("actuator", 1)),
    )


def gate_to_dict(gate: TargetGate) -> dict:
    d = {"kind": gate.kind, "n_qubits": gate.n_qubits, "qubits": list(gate.qubits),
         "theta": gate.theta}
    if gate.matrix is not None:
        d["matrix_re"] = gate.matrix.real.tolist()
        d["matrix_im"] = gate.matrix.imag.tolist()
    return d


def gate_from_dict(d: dict) -> TargetGate:
    matrix = None
    if "matrix_re" in d:
        matrix = np.array(d["matrix_re"]) + 1j * np.array(d["matrix_im"])
    return TargetGate(
        kind=d["kind"],
        n_qubits=int(d["n_qubits"]),
        qubits=tuple(int(q) for q in d.get("qubits", [])),
        theta=float(d.get("theta", 0.0)),
        matrix=matrix,
    )


def config_to_dict(cfg: OptimizerConfig) -> dict:
    return {
        "n_starts": cfg.n_starts,
        "n_select": cfg.n_select,
        "amplitude_max": cfg.amplitude_max,
        "gradient_mode": cfg.gradient_mode,
        "fd_step": cfg.fd_step,
        "convergence_tol": cfg.convergence_tol,
        "max_iters": cfg.max_iters,
        "rng_seed": cfg.rng_seed,
    }


def config_from_dict(d: dict) -> OptimizerConfig:
    return OptimizerConfig(
        n_starts=int(d.get("n_starts", 1000)),
        n_select=int(d.get("n_select", 20)),
        amplitude_max=float(d.get("amplitude_max", 20.0)),
        gradient_mode=d.get("gradient_mode", "analytic"),
        fd_step=float(d.get("fd_step", 1e-6)),
        convergence_tol=float(d.get("convergence_tol", 1e-12)),
        max_iters=int(d.get("max_iters", 5000)),
        rng_seed=int(d.get("rng_seed", 0)),
    )


def report_to_dict(rep: OptimizationReport, optimizer: OptimizerConfig,
                   notes: dict | None = None) -> dict:
    seq = rep.best_sequence
    doc = {
        "schema_version": SCHEMA_VERSION,
        "toolkit_version": __version__,
        "config": {
            "spec": spec_to_dict(rep.spec),
            "gate": gate_to_dict(rep.gate),
            "n_pulses": seq.n_pulses,
            "slice_duration": seq.slice_duration,
            "total_time": seq.total_time,
            "optimizer": config_to_dict(optimizer),
        },
        "result": {
            "best_fidelity": rep.best_fidelity,
            "gate_error": rep.gate_error,
            "h_x": seq.h_x.tolist(),
            "h_y": seq.h_y.tolist(),
            "start_fidelities": rep.start_fidelities,
            "local_searches": [
                {"fidelity": r.fidelity, "iterations": r.iterations, "converged": r.converged}
                for r in rep.local_results
            ],
            "rng_seed": rep.rng_seed,
        },
        "timing": {
            "wall_seconds": rep.wall_seconds,
            "written_utc": datetime.now(timezone.utc).isoformat(),
        },
    }
    if notes:
        doc["notes"] = notes
    return doc


def save_report(path: str | Path, rep: OptimizationReport, optimizer: OptimizerConfig,
                notes: dict | None = None) -> dict:
    doc = report_to_dict(rep, optimizer, notes)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
    return doc


def load_result(path: str | Path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ResultFileError(f"result file not found: {p}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ResultFileError(f"corrupt result file {p}: {exc}") from exc
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ResultFileError(
            f"unsupported schema_version {doc.get('schema_version')} in {p}"
        )
    return doc


def sequence_from_result(doc: dict) -> ControlSequence:
    res = doc["result"]
    return ControlSequence(
        doc["config"]["slice_duration"],
        np.array(res["h_x"], dtype=float),
        np.array(res["h_y"], dtype=float),
    )


def reevaluate(doc: dict) -> float:
    """Fidelity of the stored sequence against the stored spec and gate."""
    spec = spec_from_dict(doc["config"]["spec"])
    gate = gate_from_dict(doc["config"]["gate"])
    seq = sequence_from_result(doc)
    ev = SliceEvaluator(spec, gate)
    return ev.fidelity(seq.flat(), seq.slice_duration)


def write_csv(path: str | Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, (int, float, np.floating))
                              else str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")
