import numpy as np
import pytest

from trisign import available_backends, get_backend, set_backend, use_backend
from trisign.core import BlockView, EqualEigenvalues
from trisign.kernels import (
    CMADD,
    CostStats,
    GivensRotation,
    apply_rotation_similarity,
    block_mul_acc,
    swap_adjacent,
    swap_flops,
)

from conftest import random_tri, tri


def full(A):
    return BlockView(A, 0, A.shape[0], 0, A.shape[1])


def test_block_mul_acc_scalars():
    st = CostStats()
    C = np.zeros((1, 1), complex)
    block_mul_acc(full(C), full(np.array([[2.0 + 0j]])), full(np.array([[3.0 + 0j]])), 1, st)
    assert C[0, 0] == 6
    C = np.ones((1, 1), complex)
    block_mul_acc(full(C), full(np.array([[2.0 + 0j]])), full(np.array([[3.0 + 0j]])), -1, st)
    assert C[0, 0] == -5
    assert st.flops == 2 * CMADD


def test_block_mul_acc_triple_loop():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    B = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    C0 = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    ref = C0.copy()
    for i in range(3):
        for j in range(3):
            for k in range(3):
                ref[i, j] += A[i, k] * B[k, j]
    C = C0.copy()
    block_mul_acc(full(C), full(A), full(B), 1, CostStats())
    assert np.linalg.norm(C - ref) <= 1e-15 * np.linalg.norm(ref)


def test_block_mul_acc_counts_exactly():
    st = CostStats()
    A = np.zeros((10, 10), complex, order="F")
    total = 0
    for p, q, r in [(2, 3, 4), (1, 1, 1), (3, 0, 2), (4, 5, 1)]:
        C = np.zeros((p, q), complex)
        block_mul_acc(full(C), BlockView(A, 0, p, 0, r), BlockView(A, 0, r, 0, q), 1, st)
        total += CMADD * p * q * r
        assert st.flops == total


def test_block_mul_acc_contracts():
    A = np.zeros((4, 4), complex, order="F")
    with pytest.raises(ValueError, match="shape"):
        block_mul_acc(BlockView(A, 0, 2, 0, 2), BlockView(A, 2, 4, 0, 3), BlockView(A, 0, 2, 2, 4), 1, CostStats())
    with pytest.raises(ValueError, match="overlaps"):
        block_mul_acc(BlockView(A, 0, 2, 0, 2), BlockView(A, 1, 3, 0, 2), BlockView(A, 2, 4, 2, 4), 1, CostStats())


def test_swap_decoupled(backend):
    T = tri([[1, 0], [0, -2]])
    st = CostStats()
    G = swap_adjacent(T, 0, st)
    assert np.array_equal(T, tri([[-2, 0], [0, 1]]))
    assert G.c == 0 and abs(G.s) == 1
    assert st.swaps == 1 and st.flops == swap_flops(2)


def test_swap_coupled(backend):
    T0 = tri([[1, 3], [0, -2]])
    T = T0.copy(order="F")
    G = swap_adjacent(T, 0, CostStats())
    assert T[1, 0] == 0
    assert T[0, 0] == -2 and T[1, 1] == 1
    assert abs(np.linalg.norm(T) - np.linalg.norm(T0)) <= 1e-14 * np.linalg.norm(T0)
    assert abs(G.c**2 + abs(G.s) ** 2 - 1) <= 1e-14
    # T is the similarity G T0 G^H up to the explicitly zeroed residue
    R = G.matrix()
    assert np.allclose(R @ T0 @ R.conj().T, T, atol=1e-14)


def test_swap_4x4(backend):
    T0 = random_tri(4, 1, diag=[1, 2 + 1j, -3, 4])
    T = T0.copy(order="F")
    swap_adjacent(T, 1, CostStats())
    assert np.all(np.tril(T, -1) == 0)
    assert T[1, 1] == -3 and T[2, 2] == 2 + 1j
    assert np.array_equal(T[3, :], T0[3, :])
    assert T[0, 0] == T0[0, 0]
    # row 0 and column 3 are touched in the rotated plane
    assert not np.allclose(T[0, 1:3], T0[0, 1:3])
    assert not np.allclose(T[1:3, 3], T0[1:3, 3])
    assert np.allclose(np.sort_complex(np.diag(T)), np.sort_complex(np.diag(T0)), atol=1e-13)
    assert abs(np.linalg.norm(T) - np.linalg.norm(T0)) <= 1e-13 * np.linalg.norm(T0)


def test_swap_twice_restores_diagonal(backend):
    T0 = random_tri(6, 2, diag=[1, -2, 3, -4j + 1, 5, -6])
    T = T0.copy(order="F")
    swap_adjacent(T, 2, CostStats())
    swap_adjacent(T, 2, CostStats())
    assert np.allclose(np.diag(T), np.diag(T0), atol=1e-13)


def test_swap_equal_raises():
    with pytest.raises(EqualEigenvalues):
        swap_adjacent(tri([[1, 1], [0, 1]]), 0, CostStats())
    with pytest.raises(ValueError):
        swap_adjacent(tri([[1, 1], [0, 2]]), 1, CostStats())


def test_rotation_identity_and_roundtrip():
    A0 = np.random.default_rng(0).standard_normal((5, 5)) + 0j
    A = A0.copy()
    apply_rotation_similarity(A, GivensRotation(1.0, 0j, 2))
    assert np.array_equal(A, A0)
    G = GivensRotation(0.6, 0.8j * np.exp(0.3j), 1)
    st = CostStats()
    apply_rotation_similarity(A, G, "both", st)
    assert st.flops > 0
    apply_rotation_similarity(A, G, "both", inverse=True)
    assert np.linalg.norm(A - A0) <= 1e-14 * np.linalg.norm(A0)
    for side in ("left", "right"):
        B = A0.copy()
        apply_rotation_similarity(B, G, side)
        apply_rotation_similarity(B, G, side, inverse=True)
        assert np.allclose(B, A0, atol=1e-14)
    with pytest.raises(ValueError):
        apply_rotation_similarity(A, G, "top")
    with pytest.raises(ValueError):
        apply_rotation_similarity(A, GivensRotation(1.0, 0j, 4))


def test_rotation_from_swap_is_unitary():
    T = tri([[1, 3], [0, -2]])
    G = swap_adjacent(T, 0, CostStats())
    Q = np.eye(4, dtype=complex)
    apply_rotation_similarity(Q, GivensRotation(G.c, G.s, 1), "both")
    assert np.allclose(Q.conj().T @ Q, np.eye(4), atol=1e-14)


def test_cost_stats_merge():
    parts = [CostStats(1, 2, 3), CostStats(10, 20, 30), CostStats()]
    total = CostStats.merge(*parts)
    assert (total.flops, total.swaps, total.sim_words) == (11, 22, 33)
    assert CostStats(8).ops() == 2


def test_backend_selection():
    assert "python" in available_backends()
    before = get_backend()
    with use_backend("python"):
        assert get_backend() == "python"
    assert get_backend() == before
    with pytest.raises(ValueError):
        set_backend("fortran")
    with pytest.raises(ValueError):
        with use_backend("fortran"):
            pass


def _probe(code, **env):
    import os
    import subprocess
    import sys

    e = dict(os.environ)
    e.update(env)
    return subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=e)


def test_fallback_when_extension_missing():
    code = (
        "import sys; sys.modules['trisign._core'] = None\n"
        "import trisign, numpy as np\n"
        "print(trisign.get_backend(), trisign.available_backends())\n"
        "print(trisign.parlett_higham_sign(np.array([[1, 3], [0, -2]])).U[0, 1].real)\n"
    )
    p = _probe(code)
    assert p.returncode == 0, p.stderr
    assert p.stdout.split("\n")[:2] == ["python ['python']", "2.0"]


def test_backend_env_override():
    p = _probe("import trisign; print(trisign.get_backend())", TRISIGN_BACKEND="python")
    assert p.stdout.strip() == "python"
    p = _probe("import trisign", TRISIGN_BACKEND="fortran")
    assert p.returncode != 0 and "not available" in p.stderr
