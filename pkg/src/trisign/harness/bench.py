"""Benchmark grid runner and CSV output."""
from __future__ import annotations

import csv
import statistics
import sys
import time
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Sequence, TextIO

import numpy as np
from threadpoolctl import threadpool_limits

from ..api import TRACEABLE, compute_sign
from ..core import inertia_of
from ..recursive import DEFAULT_BASE
from .cachesim import CacheConfig, cache_sim
from .generate import GenSpec, gen_triangular
from .oracle import oracle_sign, rel_diff, residuals

__all__ = ["CSV_COLUMNS", "CSV_VERSION", "BenchRecord", "run_one", "bench_grid", "write_csv"]

CSV_VERSION = 1
CHECK_MAX_N = 128


@dataclass
class BenchRecord:
    alg: str
    n: int
    k: int
    seed: int | None
    wall_s: float
    flops: int
    swaps: int
    sim_words: int | None
    inv_res: float
    comm_res: float
    branch_eq1: int
    branch_eq2: int
    xagree: float | None = None
    oracle_err: float | None = None

    def row(self) -> list:
        out = []
        for v in astuple(self):
            if v is None:
                out.append("")
            elif isinstance(v, float):
                out.append(f"{v:.6g}")
            else:
                out.append(v)
        return out


# The first twelve columns are the fixed schema; xagree and oracle_err are
# appended and left empty when not computed.
CSV_COLUMNS = tuple(f.name for f in fields(BenchRecord))


def run_one(
    T: np.ndarray,
    alg: str,
    *,
    base: int = DEFAULT_BASE,
    repeat: int = 5,
    seed: int | None = None,
    cache: CacheConfig | None = None,
    check: bool = False,
    oracle: np.ndarray | None = None,
):
    """Time `alg` on `T` (one warmup, median of `repeat`) and fill a record.

    Returns ``(record, U)``.  Timing runs are single-threaded.  With `cache`
    an extra traced run fills ``sim_words``; with `check` (n <= 128) the
    result is compared against the eigenvector oracle.
    """
    if repeat < 1:
        raise ValueError(f"repeat must be >= 1, got {repeat}")
    times = []
    res = None
    with threadpool_limits(1):
        compute_sign(T, alg, base=base)
        for _ in range(repeat):
            t0 = time.perf_counter()
            res = compute_sign(T, alg, base=base)
            times.append(time.perf_counter() - t0)
    tag = alg if alg != "auto" else f"auto:{res.alg}"
    sim_words = None
    if cache is not None and res.alg in TRACEABLE:
        report, _ = cache_sim(res.alg, T, cache, base)
        sim_words = report.sim_words
    inv, comm = residuals(T, res.U)
    n = T.shape[0]
    oracle_err = None
    if check and n <= CHECK_MAX_N:
        oracle = oracle if oracle is not None else oracle_sign(T)
        oracle_err = rel_diff(res.U, oracle)
    rec = BenchRecord(
        tag, n, inertia_of(T).n_minus, seed, statistics.median(times),
        res.stats.flops, res.stats.swaps, sim_words, inv, comm,
        res.branch_counts[0], res.branch_counts[1], None, oracle_err,
    )
    return rec, res.U


def bench_grid(
    algs: Sequence[str],
    ns: Iterable[int],
    inertias: Iterable,
    seeds: Iterable[int],
    *,
    base: int = DEFAULT_BASE,
    repeat: int = 5,
    cache: CacheConfig | None = None,
    check: bool = False,
    progress: TextIO | None = None,
) -> list[BenchRecord]:
    """Run every (n, inertia, seed, alg) point serially.

    When several algorithms run on the same matrix, ``xagree`` holds the
    largest relative Frobenius distance from that output to any other.
    """
    records = []
    for n in ns:
        for k in inertias:
            for seed in seeds:
                T = gen_triangular(GenSpec(n, k, seed))
                oracle = oracle_sign(T) if check and n <= CHECK_MAX_N else None
                point = []
                for alg in algs:
                    rec, U = run_one(
                        T, alg, base=base, repeat=repeat, seed=seed, cache=cache, check=check, oracle=oracle
                    )
                    point.append((rec, U))
                    if progress is not None:
                        print(f"# {rec.alg} n={n} k={rec.k} seed={seed} {rec.wall_s:.4g}s", file=progress)
                if len(point) > 1:
                    for rec, U in point:
                        rec.xagree = max(rel_diff(U, V) for r2, V in point if r2 is not rec)
                records.extend(rec for rec, _ in point)
    return records


def write_csv(records: Iterable[BenchRecord], out: TextIO | None = None) -> None:
    out = out if out is not None else sys.stdout
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row())
