"""Shared fixtures and a disk cache for the expensive optimization runs.

The acceptance suite reruns multistart optimizations that take minutes
each; their results are deterministic given the seed, so they are cached
under tests/_cache keyed by the full run configuration.  Delete the
directory (or set HEISENGATE_TEST_CACHE=0) to force recomputation.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np
import pytest

from heisengate.chains import SpinChainSpec
from heisengate.gates import TargetGate
from heisengate.optimize import OptimizerConfig, global_search
from heisengate.results import (
    config_to_dict,
    gate_to_dict,
    load_result,
    save_report,
    sequence_from_result,
    spec_to_dict,
)

CACHE_DIR = Path(__file__).parent / "_cache"


def _cache_key(spec, gate, n_pulses, total_time, cfg) -> str:
    payload = json.dumps(
        {
            "spec": spec_to_dict(spec),
            "gate": gate_to_dict(gate),
            "n_pulses": n_pulses,
            "total_time": total_time,
            "optimizer": config_to_dict(cfg),
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:20]


def cached_global_search(spec: SpinChainSpec, gate: TargetGate, n_pulses: int,
                         total_time: float, cfg: OptimizerConfig):
    """global_search with an on-disk result cache (deterministic per seed)."""
    use_cache = os.environ.get("HEISENGATE_TEST_CACHE", "1") != "0"
    key = _cache_key(spec, gate, n_pulses, total_time, cfg)
    path = CACHE_DIR / f"{key}.json"
    if use_cache and path.is_file():
        doc = load_result(path)
        seq = sequence_from_result(doc)
        return doc["result"]["best_fidelity"], seq, doc
    rep = global_search(spec, gate, n_pulses, total_time / n_pulses, cfg)
    if use_cache:
        CACHE_DIR.mkdir(exist_ok=True)
        doc = save_report(path, rep, cfg)
    else:
        from heisengate.results import report_to_dict

        doc = report_to_dict(rep, cfg)
    return rep.best_fidelity, rep.best_sequence, doc


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def chain3():
    return SpinChainSpec(3)
