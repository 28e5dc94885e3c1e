"""Numerical optimal control for single-shot gate synthesis in
Heisenberg-coupled qubit chains with a locally controlled actuator qubit."""

__version__ = "0.1.0"

from .chains import Coupling, SpinChainSpec, build_control_generators, build_drift
from .evolve import ControlSequence, SliceEvaluator, expm_hermitian, propagate, trace_fidelity
from .gates import TargetGate, cnot, eswap, fredkin, gate_matrix, is_palindromic, toffoli
from .lie_closure import DlaReport, chain_dla, dla_dimension, verify_leakage_controllability
from .lowpass import FilteredControl, cutoff_scan, filter_fields, propagate_filtered, si
from .optimize import (
    GateTimeScan,
    OptimizationReport,
    OptimizerConfig,
    fidelity_gradient,
    gate_time_scan,
    global_search,
    local_search_bfgs,
)

__all__ = [
    "Coupling",
    "SpinChainSpec",
    "build_control_generators",
    "build_drift",
    "ControlSequence",
    "SliceEvaluator",
    "expm_hermitian",
    "propagate",
    "trace_fidelity",
    "TargetGate",
    "cnot",
    "eswap",
    "fredkin",
    "gate_matrix",
    "is_palindromic",
    "toffoli",
    "DlaReport",
    "chain_dla",
    "dla_dimension",
    "verify_leakage_controllability",
    "FilteredControl",
    "cutoff_scan",
    "filter_fields",
    "propagate_filtered",
    "si",
    "GateTimeScan",
    "OptimizationReport",
    "OptimizerConfig",
    "fidelity_gradient",
    "gate_time_scan",
    "global_search",
    "local_search_bfgs",
]
