"""Fidelity maximization: BFGS local searches inside a multistart strategy.

The global stage draws random amplitude vectors uniformly in the box,
keeps the best few, refines each with BFGS, deduplicates the converged
optima, and returns the maximum.  Everything is deterministic given the
RNG seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .chains import SpinChainSpec
from .evolve import ControlSequence, SliceEvaluator
from .gates import TargetGate

SUFFICIENT_INCREASE = 1e-4  # Armijo parameter for the backtracking line search
CURVATURE_GUARD = 1e-12  # skip the BFGS update when s.y is below this


@dataclass(frozen=True)
class OptimizerConfig:
    n_starts: int = 1000
    n_select: int = 20
    amplitude_max: float = 20.0
    gradient_mode: str = "analytic"  # or "finite_difference"
    fd_step: float = 1e-6
    convergence_tol: float = 1e-12
    max_iters: int = 5000
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.n_select > self.n_starts:
            raise ValueError("n_select must not exceed n_starts")
        if self.amplitude_max <= 0 or self.fd_step <= 0:
            raise ValueError("amplitude_max and fd_step must be positive")
        if self.gradient_mode not in ("analytic", "finite_difference"):
            raise ValueError(f"unknown gradient_mode {self.gradient_mode!r}")


@dataclass
class LocalSearchResult:
    flat: np.ndarray
    fidelity: float
    iterations: int
    converged: bool


@dataclass
class OptimizationReport:
    best_sequence: ControlSequence
    best_fidelity: float
    start_fidelities: list[float]
    local_results: list[LocalSearchResult]
    wall_seconds: float
    rng_seed: int
    spec: SpinChainSpec = None
    gate: TargetGate = None

    @property
    def gate_error(self) -> float:
        return 1.0 - self.best_fidelity


def fidelity_gradient(spec: SpinChainSpec, seq: ControlSequence, gate: TargetGate,
                      mode: str = "analytic", fd_step: float = 1e-6) -> np.ndarray:
    """dF/dh for every amplitude, analytic or central finite differences."""
    ev = SliceEvaluator(spec, gate)
    flat = seq.flat()
    dt = seq.slice_duration
    if mode == "analytic":
        _, grad = ev.fidelity_and_gradient(flat, dt)
        return grad
    if mode == "finite_difference":
        grad = np.empty(flat.size)
        for k in range(flat.size):
            hp = flat.copy()
            hp[k] += fd_step
            hm = flat.copy()
            hm[k] -= fd_step
            grad[k] = (ev.fidelity(hp, dt) - ev.fidelity(hm, dt)) / (2 * fd_step)
        return grad
    raise ValueError(f"unknown gradient mode {mode!r}")


def bfgs_maximize(value_and_grad, x0: np.ndarray, tol: float = 1e-12,
                  max_iters: int = 5000,
                  on_accept=None) -> tuple[np.ndarray, float, int, bool]:
    """BFGS ascent with identity initial inverse Hessian and a backtracking
    line search enforcing sufficient increase.  Accepted iterates never
    decrease the objective.  Returns (x, f, iterations, converged).

    Internally this is BFGS on -f: hinv approximates the inverse Hessian of
    -f and stays positive definite via the curvature guard."""
    x = np.asarray(x0, dtype=float).copy()
    n = x.size
    f, g = value_and_grad(x)
    eye = np.eye(n)
    hinv = eye.copy()
    for it in range(1, max_iters + 1):
        gnorm = np.linalg.norm(g)
        if gnorm < 1e-14:
            return x, f, it, True
        p = hinv @ g  # ascent direction
        slope = g @ p
        if slope <= 0:  # numerically indefinite approximation; reset
            hinv = eye.copy()
            p = g
            slope = g @ g
        alpha = 1.0
        for _ in range(60):
            x_new = x + alpha * p
            f_new, g_new = value_and_grad(x_new)
            if f_new >= f + SUFFICIENT_INCREASE * alpha * slope:
                break
            alpha *= 0.5
        else:
            return x, f, it, False  # line search exhausted
        s = x_new - x
        y_desc = -(g_new - g)  # gradient-difference of -f
        delta = f_new - f
        x, f, g = x_new, f_new, g_new
        if on_accept is not None:
            on_accept(x, f)
        if delta < tol:
            return x, f, it, True
        sy = s @ y_desc
        if sy > CURVATURE_GUARD * np.linalg.norm(s) * np.linalg.norm(y_desc):
            rho = 1.0 / sy
            v = eye - rho * np.outer(s, y_desc)
            hinv = v @ hinv @ v.T + rho * np.outer(s, s)
        # else: curvature condition violated, skip the update
    return x, f, max_iters, False


def _make_objective(ev: SliceEvaluator, dt: float, config: OptimizerConfig):
    if config.gradient_mode == "analytic":
        def value_and_grad(x):
            try:
                return ev.fidelity_and_gradient(x, dt)
            except FloatingPointError:
                # zero-overlap point: fall back to finite differences
                return _fd_value_and_grad(ev, x, dt, config.fd_step)
        return value_and_grad
    return lambda x: _fd_value_and_grad(ev, x, dt, config.fd_step)


def _fd_value_and_grad(ev, x, dt, step):
    f = ev.fidelity(x, dt)
    g = np.empty(x.size)
    for k in range(x.size):
        hp = x.copy()
        hp[k] += step
        hm = x.copy()
        hm[k] -= step
        g[k] = (ev.fidelity(hp, dt) - ev.fidelity(hm, dt)) / (2 * step)
    return f, g


def local_search_bfgs(spec: SpinChainSpec, seed_seq: ControlSequence, gate: TargetGate,
                      config: OptimizerConfig) -> OptimizationReport:
    """Refine one seed sequence; never silently reports an unimproved seed
    as converged."""
    t0 = time.perf_counter()
    ev = SliceEvaluator(spec, gate)
    dt = seed_seq.slice_duration
    vag = _make_objective(ev, dt, config)
    x, f, iters, conv = bfgs_maximize(vag, seed_seq.flat(),
                                      tol=config.convergence_tol,
                                      max_iters=config.max_iters)
    res = LocalSearchResult(x, f, iters, conv)
    best = ControlSequence.from_flat(x, dt)
    return OptimizationReport(
        best_sequence=best,
        best_fidelity=ev.fidelity(x, dt),
        start_fidelities=[vag(seed_seq.flat())[0]],
        local_results=[res],
        wall_seconds=time.perf_counter() - t0,
        rng_seed=config.rng_seed,
        spec=spec,
        gate=gate,
    )


def _deduplicate(results: list[LocalSearchResult],
                 fid_tol: float = 1e-9, amp_tol: float = 1e-6) -> list[LocalSearchResult]:
    kept: list[LocalSearchResult] = []
    for r in results:
        dup = any(
            abs(r.fidelity - k.fidelity) <= fid_tol
            and np.max(np.abs(r.flat - k.flat)) <= amp_tol
            for k in kept
        )
        if not dup:
            kept.append(r)
    return kept


def global_search(spec: SpinChainSpec, gate: TargetGate, n_pulses: int, slice_duration: float,
                  config: OptimizerConfig) -> OptimizationReport:
    """Multistart search: sample, select the top n_select, refine with BFGS,
    deduplicate, and take the maximum (ties broken by lowest start index)."""
    if n_pulses % 2 != 0 or n_pulses < 2:
        raise ValueError(f"n_pulses must be an even integer >= 2, got {n_pulses}")
    t0 = time.perf_counter()
    ev = SliceEvaluator(spec, gate)
    dt = slice_duration
    rng = np.random.default_rng(config.rng_seed)
    starts = rng.uniform(-config.amplitude_max, config.amplitude_max,
                         size=(config.n_starts, n_pulses))
    start_f = np.array([ev.fidelity(s, dt) for s in starts])
    order = np.argsort(-start_f, kind="stable")[: config.n_select]

    vag = _make_objective(ev, dt, config)
    locals_: list[LocalSearchResult] = []
    for idx in order:
        x, f, iters, conv = bfgs_maximize(vag, starts[idx],
                                          tol=config.convergence_tol,
                                          max_iters=config.max_iters)
        locals_.append(LocalSearchResult(x, f, iters, conv))
    deduped = _deduplicate(locals_)
    best_idx = int(np.argmax([r.fidelity for r in deduped]))
    best = deduped[best_idx]
    best_seq = ControlSequence.from_flat(best.flat, dt)
    return OptimizationReport(
        best_sequence=best_seq,
        best_fidelity=ev.fidelity(best.flat, dt),
        start_fidelities=start_f.tolist(),
        local_results=deduped,
        wall_seconds=time.perf_counter() - t0,
        rng_seed=config.rng_seed,
        spec=spec,
        gate=gate,
    )


@dataclass
class GateTimeScan:
    times: list[float]
    fidelities: list[float]
    target_error: float
    shortest_time: float | None  # None when no scanned time qualifies
    reports: list[OptimizationReport] = field(default_factory=list)


def gate_time_scan(spec: SpinChainSpec, gate: TargetGate, n_pulses: int,
                   total_times: list[float], target_error: float,
                   config: OptimizerConfig, keep_reports: bool = False,
                   stop_at_first: bool = False) -> GateTimeScan:
    """Best fidelity per total time; reports the smallest scanned time whose
    best fidelity reaches 1 - target_error ("threshold not reached" -> None).

    stop_at_first halts the scan at the first qualifying time (the scan is
    in increasing time order, so the result is unchanged)."""
    times = sorted(float(t) for t in total_times)
    fids: list[float] = []
    reports: list[OptimizationReport] = []
    shortest = None
    for tf in times:
        rep = global_search(spec, gate, n_pulses, tf / n_pulses, config)
        fids.append(rep.best_fidelity)
        if keep_reports:
            reports.append(rep)
        if shortest is None and rep.best_fidelity >= 1.0 - target_error:
            shortest = tf
            if stop_at_first:
                break
    return GateTimeScan(times[: len(fids)], fids, target_error, shortest, reports)
