import numpy as np
import pytest

from trisign import CostStats, parlett_higham_sign, sign_recursive_ae, sign_recursive_mm
from trisign.harness import GenSpec, gen_triangular, rel_diff, residuals

from conftest import random_tri, signed_diag, tri

HAND = [[2, 1, 0], [0, -1, 1], [0, 0, 3]]
HAND_U = [[1, 2 / 3, -1 / 6], [0, -1, 1 / 2], [0, 0, 1]]

VARIANTS = [sign_recursive_mm, sign_recursive_ae]


@pytest.mark.parametrize("fn", VARIANTS)
def test_hand_example_base_one(backend, fn):
    r = fn(tri(HAND), base=1)
    assert np.allclose(r.U, HAND_U, atol=1e-14)
    assert r.branch_counts == (2, 1)


@pytest.mark.parametrize("fn", VARIANTS)
def test_small_n_is_bitwise_higham(backend, fn):
    T = gen_triangular(GenSpec(8, "natural", 3))
    a = fn(T, base=16)
    b = parlett_higham_sign(T)
    assert np.array_equal(a.U, b.U)
    assert a.stats.flops == b.stats.flops


@pytest.mark.parametrize("fn", VARIANTS)
@pytest.mark.parametrize("n,base", [(37, 4), (64, 16), (50, 1), (100, 7), (129, 16)])
def test_agrees_with_higham(backend, fn, n, base):
    T = gen_triangular(GenSpec(n, "natural", n))
    r = fn(T, base=base, record_branches=True)
    h = parlett_higham_sign(T, record_branches=True)
    assert rel_diff(r.U, h.U) <= 1e-8
    assert np.array_equal(r.branch_map, h.branch_map)
    assert r.branch_counts == h.branch_counts
    inv, comm = residuals(T, r.U)
    assert inv <= 1e-10 and comm <= 1e-10


def test_uniform_signs(backend):
    T = random_tri(40, 1, diag=signed_diag([-1] * 40))
    for fn in VARIANTS:
        assert np.array_equal(fn(T, base=4).U, -np.eye(40))
    r = sign_recursive_ae(T, base=4, record_branches=True)
    assert r.branch_counts == (0, 40 * 39 // 2)


@pytest.mark.parametrize("fn", VARIANTS)
def test_debug_invariants(fn):
    T = gen_triangular(GenSpec(60, "natural", 11))
    r = fn(T, base=5, debug=True)
    assert r.debug.read_violations == 0
    assert r.debug.max_acc_dev <= 1e-12
    assert r.debug.leaf_checks > 0
    assert rel_diff(r.U, parlett_higham_sign(T).U) <= 1e-8
    # debug mode books the same flops as the fast path
    assert r.stats.flops == fn(T, base=5).stats.flops


def test_debug_detects_wrong_order(monkeypatch):
    from trisign import recursive

    # Finishing (I1, J1) before (I2, J1) reads entries that are not ready.
    def bad(self, i0, i1, j0, j1):
        if i1 - i0 <= self.base and j1 - j0 <= self.base:
            self.leaf(i0, i1, j0, j1)
            return
        im = recursive.split_point(i0, i1)
        jm = recursive.split_point(j0, j1)
        self.offdiagonal(i0, im, j0, jm)
        self.offdiagonal(im, i1, j0, jm)
        self.update(i0, im, jm, j1, im, i1)
        self.update(i0, im, jm, j1, j0, jm)
        self.update(im, i1, jm, j1, j0, jm)
        self.offdiagonal(im, i1, jm, j1)
        self.offdiagonal(i0, im, jm, j1)

    monkeypatch.setattr(recursive._Run, "offdiagonal", bad)
    T = gen_triangular(GenSpec(32, "natural", 1))
    r = sign_recursive_mm(T, base=4, debug=True)
    assert r.debug.read_violations > 0


def test_flop_ratios_512():
    T = gen_triangular(GenSpec(512, 256, 0))
    mm, ae = CostStats(), CostStats()
    sign_recursive_mm(T, 16, mm)
    sign_recursive_ae(T, 16, ae)
    assert abs(mm.flops / (4 * 512**3) - 1.0) <= 0.1
    assert 1 / 3 - 0.05 <= ae.flops / mm.flops <= 1 / 2 + 0.05


def test_bad_base():
    with pytest.raises(ValueError):
        sign_recursive_mm(np.eye(3), base=0)
