"""The compiled core and the pure-Python fallback must be interchangeable."""
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from trisign import ALGORITHMS, available_backends, compute_sign, use_backend
from trisign.harness import CacheConfig, GenSpec, cache_sim, gen_triangular, rel_diff

pytestmark = pytest.mark.skipif("compiled" not in available_backends(), reason="compiled core not built")


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_same_results_and_counts(alg):
    T = gen_triangular(GenSpec(45, "natural", 8))
    out = {}
    for be in ("compiled", "python"):
        with use_backend(be):
            out[be] = compute_sign(T, alg, base=6)
    a, b = out["compiled"], out["python"]
    assert a.stats == b.stats
    assert a.branch_counts == b.branch_counts
    assert rel_diff(a.U, b.U) <= 1e-12


@pytest.mark.parametrize("alg", ["parlett", "higham", "recursive-mm", "recursive-ae"])
def test_same_cache_traffic(alg):
    T = gen_triangular(GenSpec(30, 15, 1))
    reps = {}
    for be in ("compiled", "python"):
        with use_backend(be):
            reps[be] = cache_sim(alg, T, CacheConfig(200, 2), base=5)[0]
    assert reps["compiled"] == reps["python"]


def test_lru_replay_identical():
    rng = np.random.default_rng(0)
    addrs = rng.integers(0, 500, 20000)
    writes = rng.random(20000) < 0.3
    res = []
    for be in ("compiled", "python"):
        with use_backend(be) as mod:
            c = mod.LRUCache(64, 4)
            c.replay(addrs, writes)
            res.append((c.misses, c.writebacks, c.accesses, c.resident))
    assert res[0] == res[1]


def test_large_addresses_grow():
    from trisign import _core

    c = _core.LRUCache(4, 1)
    for a in (10**7, 3, 10**7, 5 * 10**7):
        c.access(a)
    assert (c.misses, c.accesses) == (3, 4)


def test_compare_backends_script_runs():
    script = Path(__file__).resolve().parents[1] / "benchmarks" / "compare_backends.py"
    out = subprocess.run(
        [sys.executable, str(script), "--n", "16", "--repeat", "1", "--alg", "higham,recursive-ae"],
        capture_output=True, text=True, check=True,
    ).stdout.splitlines()
    assert out[0] == "alg,n,backend,wall_s,flops,speedup"
    assert len(out) == 1 + 2 * len(available_backends())
