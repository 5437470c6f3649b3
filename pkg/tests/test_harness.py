import csv
import io
import json

import numpy as np
import pytest

from trisign import (
    ALGORITHMS,
    GapInfeasible,
    PureImaginaryEigenvalue,
    RepeatedEigenvalue,
    inertia_of,
    parlett_higham_sign,
    use_backend,
)
from trisign.harness import (
    CSV_COLUMNS,
    CacheConfig,
    GenSpec,
    bench_grid,
    cache_sim,
    calibrate,
    choose_algorithm,
    estimate_costs,
    gen_triangular,
    load_model,
    oracle_sign,
    rel_diff,
    residuals,
    run_one,
    write_csv,
)
from trisign.harness.select import DEFAULT_MODEL, CostModel
from trisign.kernels import Tracer

from conftest import random_tri, signed_diag, tri


# -- generator ---------------------------------------------------------------

def test_gen_positive():
    T = gen_triangular(GenSpec(4, 0, 5))
    assert np.all(np.diag(T).real > 0)
    assert (inertia_of(T).n_minus, inertia_of(T).n_plus) == (0, 4)


@pytest.mark.parametrize("n,k,seed", [(100, 3, 0), (100, 3, 9), (33, 33, 1), (64, 17, 2), (1, 1, 0)])
def test_gen_exact_inertia(n, k, seed):
    assert inertia_of(gen_triangular(GenSpec(n, k, seed))).n_minus == k


def test_gen_deterministic_and_distribution():
    a = gen_triangular(GenSpec(50, "natural", 42))
    b = gen_triangular(GenSpec(50, "natural", 42))
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, gen_triangular(GenSpec(50, "natural", 43)))
    assert np.all(np.tril(a, -1) == 0) and a.flags.f_contiguous
    off = a[np.triu_indices(50, 1)]
    assert np.all(np.abs(off.real) <= 50) and np.all(np.abs(off.imag) <= 50)
    assert off.real.std() > 20  # roughly uniform on [-50, 50] (std 28.9)


def test_gen_stream_frozen():
    # First draws of the PCG64 stream for seed 0; guards against silent
    # changes of draw order.
    T = gen_triangular(GenSpec(3, "natural", 0))
    rng = np.random.default_rng(0)
    re = rng.uniform(-50, 50, 3)
    im = rng.uniform(-50, 50, 3)
    assert T[0, 1] == re[0] + 1j * im[0]
    assert T[1, 2] == re[2] + 1j * im[2]


def test_gen_gap():
    T = gen_triangular(GenSpec(400, "natural", 1, range=1.0, gap_floor=0.05))
    d = np.diag(T)
    gaps = np.abs(d[:, None] - d[None, :]) + np.eye(400)
    assert gaps.min() >= 0.05
    # signs untouched by the gap enforcement
    assert inertia_of(T).n_minus == inertia_of(gen_triangular(GenSpec(400, "natural", 1, range=1.0, gap_floor=0))).n_minus


def test_gen_errors():
    with pytest.raises(GapInfeasible):
        gen_triangular(GenSpec(10, "natural", 0, range=1.0, gap_floor=1.0))
    with pytest.raises(ValueError):
        GenSpec(5, 6)
    with pytest.raises(ValueError):
        GenSpec(0)
    with pytest.raises(ValueError):
        GenSpec(3, range=-1)


# -- oracle and residuals ------------------------------------------------------

def test_oracle_examples():
    d = np.diag([1 + 1j, -2, 3])
    assert np.array_equal(oracle_sign(d), np.diag([1, -1, 1]).astype(complex))
    assert np.allclose(oracle_sign(tri([[1, 3], [0, -2]])), [[1, 2], [0, -1]], atol=1e-15)
    with pytest.raises(RepeatedEigenvalue):
        oracle_sign(tri([[1, 1], [0, 1]]))
    with pytest.raises(PureImaginaryEigenvalue):
        oracle_sign(tri([[1j, 1], [0, 1]]))


def test_oracle_vs_higham_32():
    T = gen_triangular(GenSpec(32, "natural", 3))
    assert rel_diff(oracle_sign(T), parlett_higham_sign(T).U) <= 1e-6


def test_residual_examples():
    assert residuals(random_tri(4, 0, diag=[1, 2, 3, 4]), np.eye(4)) == (0.0, 0.0)
    assert residuals(tri([[1, 3], [0, -2]]), tri([[1, 2], [0, -1]])) == (0.0, 0.0)
    U = tri([[1, 2], [0, -1]])
    U[0, 0] += 1e-8
    inv, _ = residuals(tri([[1, 3], [0, -2]]), U)
    assert 0 < inv < 1e-7
    with pytest.raises(ValueError):
        residuals(np.eye(2), np.eye(3))


def test_residuals_finite_for_huge_sign():
    T = tri([[1, 3e200], [0, -2]])
    U = tri([[1, 2e200], [0, -1]])
    inv, comm = residuals(T, U)
    assert np.isfinite(inv) and np.isfinite(comm) and inv < 1e-15 and comm < 1e-15


# -- cache simulation ------------------------------------------------------------

class Recorder:
    """Duck-typed cache for the Python backend that keeps the address stream."""

    def __init__(self):
        self.addrs = []
        self.writes = []

    def access(self, addr, write=False):
        self.addrs.append(addr)
        self.writes.append(write)


def trace_of(alg, T, base=4):
    from trisign.api import compute_sign

    rec = Recorder()
    with use_backend("python"):
        compute_sign(T, alg, base=base, tracer=Tracer(T.shape[0], rec))
    return rec


@pytest.mark.parametrize("alg", ["parlett", "higham", "recursive-mm", "recursive-ae"])
def test_cache_cold_floor_and_no_reuse(backend, alg):
    T = gen_triangular(GenSpec(24, "natural", 4))
    rec = trace_of(alg, T)
    big, _ = cache_sim(alg, T, CacheConfig(10**6, 1), base=4)
    assert big.accesses == len(rec.addrs)
    assert big.misses == len(set(rec.addrs))
    assert big.writebacks == 0  # nothing is ever evicted
    tiny, _ = cache_sim(alg, T, CacheConfig(1, 1), base=4)
    a = np.array(rec.addrs)
    assert tiny.misses == 1 + int(np.count_nonzero(a[1:] != a[:-1]))
    assert tiny.sim_words <= tiny.accesses


def test_cache_lines():
    T = gen_triangular(GenSpec(20, "natural", 4))
    rec = trace_of("higham", T)
    r, _ = cache_sim("higham", T, CacheConfig(10**6, 8))
    assert r.misses == len({a // 8 for a in rec.addrs})
    assert r.sim_words == 8 * r.misses


@pytest.mark.parametrize("alg", ["higham", "recursive-mm"])
def test_cache_monotone_in_M(alg):
    T = gen_triangular(GenSpec(48, 24, 0))
    words = [cache_sim(alg, T, CacheConfig(M, 1), base=8)[0].sim_words for M in (1, 16, 64, 256, 1024, 4096, 1 << 16)]
    assert all(a >= b for a, b in zip(words, words[1:]))


def test_cache_lru_semantics(backend):
    from trisign.kernels import impl

    c = impl().LRUCache(3, 1)
    for a in [1, 2, 3, 1, 4, 2, 1]:
        c.access(a)
    # 1,2,3 cold; 1 hit; 4 evicts 2; 2 evicts 3; 1 hit
    assert (c.misses, c.accesses, c.resident) == (5, 7, 3)
    c = impl().LRUCache(2, 1)
    c.access(0, True)
    c.access(1)
    c.access(2)
    assert c.writebacks == 1
    c = impl().LRUCache(8, 4)
    c.replay(np.array([0, 1, 2, 3, 4, 100, 5]))
    assert c.misses == 3 and c.sim_words == 12
    with pytest.raises(ValueError):
        impl().LRUCache(2, 4)


def test_cache_config_and_untraceable():
    with pytest.raises(ValueError):
        CacheConfig(0)
    with pytest.raises(ValueError):
        CacheConfig(8, 1, "fifo")
    with pytest.raises(ValueError):
        cache_sim("sylvester", np.eye(3), CacheConfig(8))


def test_cache_stats_filled():
    T = gen_triangular(GenSpec(16, "natural", 0))
    rep, res = cache_sim("higham", T, CacheConfig(64))
    assert res.stats.sim_words == rep.sim_words > 0
    assert np.array_equal(res.U, parlett_higham_sign(T).U)


# -- selection ---------------------------------------------------------------------

def _diag_matrix(signs):
    return np.diag(signed_diag(signs)).astype(complex)


def test_choose_examples():
    n = 1024
    few = [-1, -1] + [1] * (n - 2)
    assert choose_algorithm(_diag_matrix(few), DEFAULT_MODEL) == "sylvester"
    rng = np.random.default_rng(0)
    balanced = list(rng.choice([-1, 1], n))
    assert choose_algorithm(_diag_matrix(balanced), DEFAULT_MODEL) == "recursive-mm"
    c = estimate_costs(_diag_matrix(few), DEFAULT_MODEL)
    assert c["sylvester"] == DEFAULT_MODEL.c2 * 2 * (n - 2) * n
    with pytest.raises(PureImaginaryEigenvalue):
        choose_algorithm(np.diag([1j, 1]))


def test_choose_toy_size():
    assert choose_algorithm(_diag_matrix([1, -1, 1, -1, 1, -1, 1, -1])) in ("sylvester", "recursive-mm")


def test_calibration_roundtrip(tmp_path, monkeypatch):
    path = tmp_path / "cal.json"
    monkeypatch.setenv("TRISIGN_CONFIG", str(path))
    assert load_model() == DEFAULT_MODEL
    model = calibrate(n=64)
    data = json.loads(path.read_text())
    assert data["source"] == "calibrated" and data["n"] == 64
    assert load_model() == model
    assert all(v >= 0 for v in (model.c1, model.c2, model.c3))
    path.write_text("{not json")
    assert load_model() == DEFAULT_MODEL


# -- bench -----------------------------------------------------------------------

def test_run_one_higham():
    T = gen_triangular(GenSpec(64, "natural", 1))
    rec, U = run_one(T, "higham", repeat=2, seed=1, check=True)
    assert rec.alg == "higham" and rec.n == 64 and rec.seed == 1
    assert rec.inv_res <= 1e-10 and rec.comm_res <= 1e-10
    assert rec.oracle_err <= 1e-6
    assert rec.branch_eq1 + rec.branch_eq2 == 64 * 63 // 2
    assert rec.wall_s > 0 and rec.sim_words is None


def test_bench_all_and_csv():
    recs = bench_grid(list(ALGORITHMS), [50], ["natural"], [2], repeat=1, cache=CacheConfig(256))
    assert [r.alg for r in recs] == list(ALGORITHMS)
    assert all(r.xagree <= 1e-8 for r in recs)
    assert recs[2].sim_words is None and recs[1].sim_words > 0
    buf = io.StringIO()
    write_csv(recs, buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[0][:12] == "alg,n,k,seed,wall_s,flops,swaps,sim_words,inv_res,comm_res,branch_eq1,branch_eq2".split(",")
    assert len(rows) == 6


def test_bench_auto_tag():
    recs = bench_grid(["auto"], [16], [1], [0], repeat=1)
    assert recs[0].alg in ("auto:sylvester", "auto:recursive-mm")
    with pytest.raises(ValueError):
        run_one(np.eye(2), "higham", repeat=0)
