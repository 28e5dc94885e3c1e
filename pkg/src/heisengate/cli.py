"""Command-line front end: reproducible optimization runs and scans.

Exit codes: 0 success, 1 validation error, 2 numerical failure
(optimizer non-convergence is recorded inside the result file, not as an
exit failure).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .chains import ChainSpecError, Coupling, SpinChainSpec
from .evolve import ControlSequence, SequenceError, SliceEvaluator
from .gates import GateError, TargetGate, cnot, eswap, fredkin, toffoli
from .lie_closure import chain_dla
from .lowpass import cutoff_scan, filter_fields, propagate_filtered_converged
from .optimize import OptimizerConfig, gate_time_scan, global_search
from .results import (
    ResultFileError,
    config_from_dict,
    gate_from_dict,
    load_result,
    reevaluate,
    save_report,
    sequence_from_result,
    spec_from_dict,
    write_csv,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


class ValidationError(ValueError):
    pass


def parse_coupling(text: str) -> Coupling:
    parts = text.split(":")
    kind = parts[0].lower()
    try:
        if kind == "xxx":
            return Coupling.xxx()
        if kind == "xxz":
            return Coupling.xxz(float(parts[1]))
        if kind == "xyz":
            jx, jy, jz = (float(v) for v in parts[1].split(","))
            return Coupling.xyz(jx, jy, jz)
    except (IndexError, ValueError) as exc:
        raise ValidationError(f"bad coupling {text!r}: {exc}") from exc
    raise ValidationError(f"unknown coupling kind {kind!r} (use xxx, xxz:D, xyz:a,b,c)")


def _parse_angle(text: str) -> float:
    # accepts plain floats and simple pi fractions like pi/4 or 2pi/3
    t = text.replace(" ", "")
    if "pi" in t:
        num, _, den = t.partition("/")
        coeff = num.replace("pi", "")
        val = float(coeff) if coeff not in ("", "+", "-") else float(coeff + "1")
        val *= math.pi
        return val / float(den) if den else val
    return float(t)


def parse_gate(text: str, n_qubits: int | None) -> TargetGate:
    parts = text.split(":")
    kind = parts[0].lower()
    try:
        if kind == "toffoli":
            return toffoli(n_qubits or 3)
        if kind == "fredkin":
            return fredkin(n_qubits or 3)
        if kind == "cnot":
            c, t = (int(v) for v in parts[1].split(",")) if len(parts) > 1 else (2, 3)
            return cnot(c, t, n_qubits or 3)
        if kind == "eswap":
            theta = _parse_angle(parts[1]) if len(parts) > 1 else math.pi / 4
            if len(parts) > 2:
                q1, q2 = (int(v) for v in parts[2].split(","))
                return eswap(theta, (q1, q2), n_qubits or 3)
            return eswap(theta, (1, 2), n_qubits or 2)
    except (IndexError, ValueError) as exc:
        raise ValidationError(f"bad gate {text!r}: {exc}") from exc
    raise ValidationError(
        f"unknown gate {text!r} (use toffoli, fredkin, cnot[:c,t], eswap[:theta[:q1,q2]])"
    )


def parse_grid(text: str) -> list[float]:
    """Either comma-separated values or start:stop:step (inclusive stop)."""
    if ":" in text:
        try:
            start, stop, step = (float(v) for v in text.split(":"))
        except ValueError as exc:
            raise ValidationError(f"bad grid {text!r}: {exc}") from exc
        if step <= 0 or stop < start:
            raise ValidationError(f"bad grid {text!r}: need start<=stop and step>0")
        n = int(round((stop - start) / step))
        return [start + k * step for k in range(n + 1)]
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ValidationError(f"bad grid {text!r}: {exc}") from exc


def build_spec(args) -> SpinChainSpec:
    try:
        return SpinChainSpec(
            n_qubits=args.n if args.n is not None else 3,
            coupling=parse_coupling(args.coupling),
            global_field=args.omega,
            leakage=args.mu,
            actuator=args.actuator,
        )
    except ChainSpecError as exc:
        raise ValidationError(str(exc)) from exc


def build_optimizer_config(args) -> OptimizerConfig:
    try:
        return OptimizerConfig(
            n_starts=args.restarts,
            n_select=args.top,
            amplitude_max=args.amax,
            convergence_tol=args.tol,
            max_iters=args.max_iters,
            rng_seed=args.seed,
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def _require(args, names: list[str]) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise ValidationError(f"missing required option --{name.replace('_', '-')}")


def _resolve_schedule(args) -> tuple[int, float]:
    _require(args, ["nf", "tf"])
    if args.nf % 2 != 0 or args.nf < 2:
        raise ValidationError(f"--nf must be an even integer >= 2, got {args.nf}")
    if args.tf <= 0:
        raise ValidationError(f"--tf must be positive, got {args.tf}")
    return args.nf, args.tf / args.nf


def cmd_optimize(args) -> int:
    _require(args, ["gate", "out"])
    n_pulses, dt = _resolve_schedule(args)
    gate = parse_gate(args.gate, args.n)
    args.n = gate.n_qubits  # chain size follows the gate embedding
    spec = build_spec(args)
    cfg = build_optimizer_config(args)
    rep = global_search(spec, gate, n_pulses, dt, cfg)
    notes = {"eswap_embedding": "embedded" if gate.kind == "eswap" and spec.n_qubits > 2 else None}
    save_report(args.out, rep, cfg, notes={k: v for k, v in notes.items() if v})
    converged = any(r.converged for r in rep.local_results)
    print(f"gate={gate.label()} N_f={n_pulses} t_f={n_pulses*dt:g}/J")
    print(f"best fidelity F = {rep.best_fidelity:.12f} (gate error {rep.gate_error:.3e})")
    print(f"converged: {converged}  wall time: {rep.wall_seconds:.1f} s")
    print(f"result written to {args.out}")
    if args.plot:
        from .plots import render_pulse_sequence

        fig_path = Path(args.out).with_suffix(".png")
        render_pulse_sequence(rep.best_sequence, fig_path,
                              title=f"{gate.label()}, t_f={n_pulses*dt:g}/J")
        print(f"figure written to {fig_path}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    _require(args, ["result"])
    doc = load_result(args.result)
    f = reevaluate(doc)
    stored = doc["result"]["best_fidelity"]
    print(f"stored fidelity:      {stored:.15f}")
    print(f"re-evaluated fidelity: {f:.15f}")
    if abs(f - stored) > 1e-12:
        print("MISMATCH beyond 1e-12", file=sys.stderr)
        return EXIT_NUMERICAL
    print("round-trip OK (within 1e-12)")
    return EXIT_OK


def cmd_scan_time(args) -> int:
    _require(args, ["gate", "nf", "tf_grid", "out"])
    times = parse_grid(args.tf_grid)
    gate = parse_gate(args.gate, args.n)
    spec = build_spec(args)
    cfg = build_optimizer_config(args)
    scan = gate_time_scan(spec, gate, args.nf, times, args.target_error, cfg)
    write_csv(args.out, ["t_f [1/J]", "best_fidelity [dimensionless]"],
              zip(scan.times, scan.fidelities))
    if scan.shortest_time is None:
        print(f"threshold not reached: no scanned t_f gives F >= 1-{args.target_error:g}")
    else:
        print(f"shortest scanned t_f with F >= 1-{args.target_error:g}: "
              f"{scan.shortest_time:g}/J")
    print(f"scan written to {args.out}")
    if args.plot:
        from .plots import render_error_curve

        fig_path = Path(args.out).with_suffix(".png")
        render_error_curve(scan.times, [1 - f for f in scan.fidelities],
                           r"$t_f$ [1/J]", fig_path, title=gate.label())
        print(f"figure written to {fig_path}")
    return EXIT_OK


def cmd_filter(args) -> int:
    _require(args, ["result", "cutoff", "out"])
    doc = load_result(args.result)
    spec = spec_from_dict(doc["config"]["spec"])
    gate = gate_from_dict(doc["config"]["gate"])
    seq = sequence_from_result(doc)
    filtered = filter_fields(seq, args.cutoff)
    _, f_filt, substeps = propagate_filtered_converged(spec, filtered, gate,
                                                      args.substeps)
    t = np.linspace(0, seq.total_time, args.trace_points)
    hx, hy = filtered.fields(t)
    write_csv(args.out, ["t [1/J]", "h_x_filtered [J]", "h_y_filtered [J]"],
              zip(t, hx, hy))
    print(f"cutoff omega0 = {args.cutoff:g} J, substeps/slice = {substeps}")
    print(f"filtered-field fidelity F_f = {f_filt:.10f} (error {1-f_filt:.3e})")
    print(f"field trace written to {args.out}")
    if args.plot:
        from .plots import render_filtered_fields

        fig_path = Path(args.out).with_suffix(".png")
        render_filtered_fields(filtered, fig_path,
                               title=f"omega0 = {args.cutoff:g} J")
        print(f"figure written to {fig_path}")
    return EXIT_OK


def cmd_scan_cutoff(args) -> int:
    _require(args, ["result", "cutoff_grid", "out"])
    doc = load_result(args.result)
    spec = spec_from_dict(doc["config"]["spec"])
    gate = gate_from_dict(doc["config"]["gate"])
    seq = sequence_from_result(doc)
    scan = cutoff_scan(spec, seq, gate, parse_grid(args.cutoff_grid), args.substeps)
    write_csv(args.out, ["omega0 [J]", "gate_error [dimensionless]"],
              zip(scan.cutoffs, scan.errors))
    print(f"scanned {len(scan.cutoffs)} cutoffs; results in {args.out}")
    if args.plot:
        from .plots import render_error_curve

        fig_path = Path(args.out).with_suffix(".png")
        render_error_curve(scan.cutoffs, scan.errors, r"$\omega_0$ [J]", fig_path,
                           title=gate_from_dict(doc["config"]["gate"]).label())
        print(f"figure written to {fig_path}")
    return EXIT_OK


def leakage_curve(doc: dict, mu_values: list[float]) -> list[tuple[float, float]]:
    """Fidelity of a stored (leakage-free-optimized) sequence when the
    control fields leak onto neighboring qubits with decay mu."""
    base_spec = spec_from_dict(doc["config"]["spec"])
    gate = gate_from_dict(doc["config"]["gate"])
    seq = sequence_from_result(doc)
    out = []
    for mu in mu_values:
        spec = SpinChainSpec(base_spec.n_qubits, base_spec.coupling,
                             base_spec.global_field, leakage=float(mu),
                             actuator=base_spec.actuator)
        ev = SliceEvaluator(spec, gate)
        out.append((float(mu), ev.fidelity(seq.flat(), seq.slice_duration)))
    return out


def cmd_scan_leakage(args) -> int:
    _require(args, ["result", "mu_grid", "out"])
    doc = load_result(args.result)
    curve = leakage_curve(doc, parse_grid(args.mu_grid))
    write_csv(args.out, ["mu_leak [dimensionless]", "fidelity [dimensionless]"], curve)
    src = doc["result"]
    print("benchmark curve for the stored optimum "
          f"(F = {src['best_fidelity']:.6f}, seed = {src['rng_seed']})")
    print(f"scan written to {args.out}")
    if args.plot:
        from .plots import render_fidelity_curve

        fig_path = Path(args.out).with_suffix(".png")
        render_fidelity_curve([m for m, _ in curve], [f for _, f in curve],
                              r"$\mu_L$", fig_path)
        print(f"figure written to {fig_path}")
    return EXIT_OK


def cmd_reopt_leakage(args) -> int:
    _require(args, ["result", "mu", "out"])
    doc = load_result(args.result)
    base_spec = spec_from_dict(doc["config"]["spec"])
    gate = gate_from_dict(doc["config"]["gate"])
    spec = SpinChainSpec(base_spec.n_qubits, base_spec.coupling,
                         base_spec.global_field, leakage=args.mu,
                         actuator=base_spec.actuator)
    n_pulses = args.nf if args.nf is not None else doc["config"]["n_pulses"]
    tf = args.tf if args.tf is not None else doc["config"]["total_time"]
    cfg = build_optimizer_config(args)
    rep = global_search(spec, gate, n_pulses, tf / n_pulses, cfg)
    save_report(args.out, rep, cfg, notes={"reoptimized_with_leakage": args.mu,
                                           "source_result": str(args.result)})
    print(f"re-optimized with leakage mu = {args.mu:g} at t_f = {tf:g}/J")
    print(f"best fidelity F = {rep.best_fidelity:.10f} (gate error {rep.gate_error:.3e})")
    print(f"result written to {args.out}")
    return EXIT_OK


def cmd_scan_field(args) -> int:
    _require(args, ["gate", "nf", "omega_grid", "tf_grid", "out"])
    omegas = parse_grid(args.omega_grid)
    times = parse_grid(args.tf_grid)
    errors = [float(e) for e in args.target_errors.split(",")]
    gate = parse_gate(args.gate, args.n)
    cfg = build_optimizer_config(args)
    rows = []
    for om in omegas:
        ns = argparse.Namespace(**vars(args))
        ns.omega = om
        spec = build_spec(ns)
        for err in errors:
            scan = gate_time_scan(spec, gate, args.nf, times, err, cfg,
                                  stop_at_first=True)
            rows.append((om, err,
                         float("nan") if scan.shortest_time is None else scan.shortest_time))
            tag = "n/a" if scan.shortest_time is None else f"{scan.shortest_time:g}/J"
            print(f"Omega = {om:g} J, target error {err:g}: shortest t_f = {tag}")
    write_csv(args.out, ["Omega [J]", "target_error [dimensionless]",
                         "shortest_t_f [1/J]"], rows)
    print(f"table written to {args.out}")
    return EXIT_OK


def cmd_dla(args) -> int:
    spec = build_spec(args)
    if args.controls not in ("xy", "x", "y"):
        raise ValidationError(f"--controls must be xy, x, or y, got {args.controls!r}")
    rep = chain_dla(spec, args.controls)
    status = "PASS" if rep.complete else "SUBSPACE"
    print(f"N = {rep.n_qubits}, generators: {', '.join(rep.generator_labels)}")
    print(f"DLA dimension = {rep.dimension} (complete controllability needs "
          f"{rep.expected_dimension})")
    print(f"closure sweeps = {rep.closure_iterations}, "
          f"orthogonality residual = {rep.orthogonality_residual:.2e}")
    print(f"status: {status}")
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file of default option values")
    p.add_argument("--n", type=int, default=None,
                   help="chain length (default 3; 2 for a standalone eSWAP)")
    p.add_argument("--coupling", default="xxx", help="xxx | xxz:DELTA | xyz:JX,JY,JZ")
    p.add_argument("--omega", type=float, default=0.0, help="global z field [J]")
    p.add_argument("--mu", type=float, default=None, help="control-leakage decay rate")
    p.add_argument("--actuator", type=int, default=1, help="actuator qubit (1-based)")
    p.add_argument("--gate", help="toffoli | fredkin | cnot[:c,t] | eswap[:theta[:q1,q2]]")
    p.add_argument("--nf", type=int, help="total number of pulses N_f (even)")
    p.add_argument("--tf", type=float, help="total time t_f [1/J]")
    p.add_argument("--restarts", type=int, default=1000, help="random start points")
    p.add_argument("--top", type=int, default=20, help="starts kept for local search")
    p.add_argument("--amax", type=float, default=20.0, help="amplitude box [J]")
    p.add_argument("--tol", type=float, default=1e-12, help="fidelity-change tolerance")
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--out", type=Path, help="output file (result JSON or CSV)")
    p.add_argument("--plot", action="store_true", help="also render a figure (PNG)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heisengate",
        description="Single-shot gate synthesis in Heisenberg-coupled qubit chains",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    parser._hg_subparsers = []  # for config-file default injection
    _orig_add = sub.add_parser

    def add_parser(*a, **kw):
        p = _orig_add(*a, **kw)
        parser._hg_subparsers.append(p)
        return p

    sub.add_parser = add_parser

    p = sub.add_parser("optimize", help="multistart optimization of one gate")
    _add_common(p)

    p = sub.add_parser("evaluate", help="re-evaluate a stored result file")
    _add_common(p)
    p.add_argument("result", type=Path)

    p = sub.add_parser("scan-time", help="best fidelity per total time")
    _add_common(p)
    p.add_argument("--tf-grid", help="t_f values: list a,b,c or start:stop:step")
    p.add_argument("--target-error", type=float, default=1e-2)

    p = sub.add_parser("filter", help="low-pass filter a stored optimum")
    _add_common(p)
    p.add_argument("result", type=Path)
    p.add_argument("--cutoff", type=float, help="cutoff frequency omega0 [J]")
    p.add_argument("--substeps", type=int, default=64)
    p.add_argument("--trace-points", type=int, default=1000)

    p = sub.add_parser("scan-cutoff", help="filtered-field error vs cutoff")
    _add_common(p)
    p.add_argument("result", type=Path)
    p.add_argument("--cutoff-grid", default="2:40:1")
    p.add_argument("--substeps", type=int, default=64)

    p = sub.add_parser("scan-leakage", help="benchmark fidelity vs leakage")
    _add_common(p)
    p.add_argument("result", type=Path)
    p.add_argument("--mu-grid", default="2:8:0.1")

    p = sub.add_parser("reopt-leakage", help="re-optimize with leakage")
    _add_common(p)
    p.add_argument("result", type=Path)

    p = sub.add_parser("scan-field", help="gate times vs global field (table)")
    _add_common(p)
    p.add_argument("--omega-grid", help="Omega values")
    p.add_argument("--tf-grid", help="t_f scan values per Omega")
    p.add_argument("--target-errors", default="1e-2,1e-3")

    p = sub.add_parser("dla", help="dynamical-Lie-algebra dimension check")
    _add_common(p)
    p.add_argument("--controls", default="xy", help="control set: xy, x, or y")

    return parser


_COMMANDS = {
    "optimize": cmd_optimize,
    "evaluate": cmd_evaluate,
    "scan-time": cmd_scan_time,
    "filter": cmd_filter,
    "scan-cutoff": cmd_scan_cutoff,
    "scan-leakage": cmd_scan_leakage,
    "reopt-leakage": cmd_reopt_leakage,
    "scan-field": cmd_scan_field,
    "dla": cmd_dla,
}


def _apply_config_file(parser, argv):
    """Pre-scan for --config and merge the file's values as defaults."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        cfg_path = Path(argv[idx + 1])
    except IndexError:
        raise ValidationError("--config needs a file path")
    try:
        overrides = json.loads(cfg_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config file {cfg_path}: {exc}")
    if not isinstance(overrides, dict):
        raise ValidationError(f"config file {cfg_path} must hold a JSON object")
    defaults = {k.replace("-", "_"): v for k, v in overrides.items()}
    parser.set_defaults(**defaults)
    for sub in getattr(parser, "_hg_subparsers", []):
        sub.set_defaults(**defaults)
    return argv


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = make_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (ValidationError, ChainSpecError, GateError, SequenceError,
            ResultFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FloatingPointError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
