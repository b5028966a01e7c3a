"""Scaling benchmarks for the encoding and folding kernels.

Random complete structures are generated at geometric lengths (a planted
equation-to-variable diagonal guarantees completeness; the rest of the
incidence is uniform).  The encode benchmark caps the equation count at 2.5K,
so the largest structures are dense; the folding benchmark caps at 2K
equations, which keeps total reasoning work proportional to structure length
and exposes the expected linear growth.

``run_bench`` times the selected operation per size on one or both kernel
backends and reports the fitted log-log slope.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .causal import tcm
from .fd import h_encode_compiled
from .structure import Structure

ENCODE_MAX_EQUATIONS = 2500
FOLDING_MAX_EQUATIONS = 2048


def random_complete_structure(total_len: int, n_eq: int, seed: int = 0,
                              n_exo: int | None = None) -> Structure:
    """A complete structure of ~``total_len`` variable occurrences.

    Equation i always contains variable i (which makes the structure
    complete); the first ``n_exo`` equations stay single-variable setters and
    the remaining incidence is sampled uniformly.
    """
    if n_eq > total_len:
        raise ValueError("total length below one occurrence per equation")
    rng = np.random.default_rng(seed)
    if n_exo is None:
        n_exo = max(1, n_eq // 3)
    extra = total_len - n_eq
    keys = np.zeros(0, np.int64)
    if extra > 0:
        want = int(extra * 1.4) + 16
        eqs = rng.integers(n_exo, n_eq, want).astype(np.int64)
        vs = rng.integers(0, n_eq, want).astype(np.int64)
        keys = np.unique(eqs * n_eq + vs)
        diag = np.arange(n_eq, dtype=np.int64) * n_eq + np.arange(n_eq, dtype=np.int64)
        keys = np.setdiff1d(keys, diag, assume_unique=True)
        rng.shuffle(keys)
        keys = np.sort(keys[:extra])
    diag = np.arange(n_eq, dtype=np.int64) * n_eq + np.arange(n_eq, dtype=np.int64)
    all_keys = np.sort(np.concatenate([diag, keys]))
    eq_ids = all_keys // n_eq
    var_ids = all_keys % n_eq
    counts = np.bincount(eq_ids, minlength=n_eq)
    splits = np.cumsum(counts)[:-1]
    incidence = [row for row in np.split(var_ids, splits)]
    equations = [f"f{i}" for i in range(n_eq)]
    variables = [f"v{i}" for i in range(n_eq)]
    return Structure(equations, variables, incidence)


@dataclass
class BenchPoint:
    op: str
    backend: str
    size: int
    n_equations: int
    seconds: float


def _encode_once(structure: Structure):
    mapping = tcm(structure)
    return h_encode_compiled(structure, mapping)


def _time_op(op: str, structure: Structure, repeats: int) -> float:
    best = float("inf")
    if op == "folding":
        sigma = _encode_once(structure)
        arrays = sigma.compiled().folding_arrays()
        n_attrs = sigma.compiled().n_attrs
        for _ in range(repeats):
            t0 = time.perf_counter()
            _kernels.folding_all(*arrays, n_attrs)
            best = min(best, time.perf_counter() - t0)
    elif op == "encode":
        for _ in range(repeats):
            t0 = time.perf_counter()
            _encode_once(structure)
            best = min(best, time.perf_counter() - t0)
    else:
        raise ValueError(f"unknown bench op {op!r}")
    return best


def run_bench(op: str, min_exp: int = 10, max_exp: int = 20, repeats: int = 3,
              backends: tuple[str, ...] = ("numba", "python"), seed: int = 7,
              ) -> list[BenchPoint]:
    points: list[BenchPoint] = []
    saved = os.environ.get("HYPODB_DISABLE_NUMBA")
    try:
        for backend in backends:
            if backend == "python":
                os.environ["HYPODB_DISABLE_NUMBA"] = "1"
            else:
                os.environ.pop("HYPODB_DISABLE_NUMBA", None)
                if not _kernels.numba_enabled():
                    continue  # numba unavailable in this environment
            _kernels.warmup()
            for exp in range(min_exp, max_exp + 1):
                size = 1 << exp
                cap = ENCODE_MAX_EQUATIONS if op == "encode" else FOLDING_MAX_EQUATIONS
                n_eq = min(cap, size)
                structure = random_complete_structure(size, n_eq, seed + exp)
                points.append(BenchPoint(
                    op, backend, size, n_eq, _time_op(op, structure, repeats)
                ))
    finally:
        if saved is None:
            os.environ.pop("HYPODB_DISABLE_NUMBA", None)
        else:
            os.environ["HYPODB_DISABLE_NUMBA"] = saved
    return points


def loglog_slope(points: list[BenchPoint]) -> float:
    """Least-squares slope of log2(time) against log2(size)."""
    xs = np.log2([p.size for p in points])
    ys = np.log2([max(p.seconds, 1e-9) for p in points])
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def format_report(points: list[BenchPoint]) -> dict:
    report: dict = {"points": [vars(p) for p in points], "slopes": {}}
    for backend in {p.backend for p in points}:
        sub = [p for p in points if p.backend == backend]
        report["slopes"][backend] = loglog_slope(sub)
    return report
