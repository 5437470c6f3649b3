"""Parlett-Sylvester path: sign reordering, triangular Sylvester solves and
the block recurrence.

For the sign function the reordered matrix ``W T W^H = [[T11, T12], [0, T22]]``
has T11 with the negative spectrum and T22 with the positive one, so its sign
is ``[[-I, F], [0, I]]``.  The (1,2) block of ``U T = T U`` reads
``-T12 + F T22 = T11 F + T12``, i.e. ``T11 F - F T22 = -2 T12``; this is the
general block right-hand side ``F11 T12 - T12 F22`` with ``F11 = -I`` and
``F22 = I`` and no intermediate blocks.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .classic import SignResult
from .core import (
    ILL_CONDITIONED_RTOL,
    BlockView,
    IllConditionedWarning,
    SingularSylvester,
    as_triangular,
    diag_signs,
)
from .kernels import CostStats, GivensRotation, block_mul_acc, impl, swap_adjacent, ROT_PAIR

__all__ = [
    "ReorderPlan",
    "SYLVESTER_LEAF",
    "reorder_by_sign",
    "count_sign_inversions",
    "solve_tri_sylvester",
    "parlett_sylvester_sign",
    "block_parlett_sylvester",
]

SYLVESTER_LEAF = 8


@dataclass
class ReorderPlan:
    """Rotations applied by :func:`reorder_by_sign`, in application order."""

    rotations: list[GivensRotation] = field(default_factory=list)
    order: str = "negatives-first"

    @property
    def k(self) -> int:
        return len(self.rotations)


def count_sign_inversions(signs) -> int:
    """Number of (positive before negative) pairs in a sign sequence."""
    positives = 0
    inversions = 0
    for s in signs:
        if s > 0:
            positives += 1
        else:
            inversions += positives
    return inversions


def reorder_by_sign(T: np.ndarray, stats: CostStats | None = None) -> ReorderPlan:
    """Move negative-real-part eigenvalues to the front of triangular `T`.

    `T` must be a Fortran-ordered complex128 array; it is overwritten.  Each
    sweep swaps every adjacent (positive, negative) pair, so the relative
    order within each sign class is kept and the number of swaps equals the
    number of sign inversions.
    """
    stats = stats if stats is not None else CostStats()
    neg = diag_signs(T) < 0
    plan = ReorderPlan()
    n = T.shape[0]
    # Insertion-style pass: each negative entry bubbles left past the positives.
    nplaced = 0
    for j in range(n):
        if not neg[j]:
            continue
        for p in range(j - 1, nplaced - 1, -1):
            plan.rotations.append(swap_adjacent(T, p, stats))
        nplaced += 1
    return plan


def _check_separation(a: np.ndarray, b: np.ndarray) -> None:
    if a.size == 0 or b.size == 0:
        return
    gap = np.abs(a[:, None] - b[None, :])
    if np.any(gap == 0):
        i, j = np.unravel_index(int(np.argmin(gap)), gap.shape)
        raise SingularSylvester(f"a[{i},{i}] == b[{j},{j}]; the Sylvester equation is singular")
    scale = np.maximum(np.abs(a)[:, None], np.abs(b)[None, :])
    if np.any(gap < ILL_CONDITIONED_RTOL * scale):
        warnings.warn(
            "Sylvester coefficient blocks have nearly equal eigenvalues",
            IllConditionedWarning,
            stacklevel=3,
        )


def solve_tri_sylvester(
    A,
    B,
    C,
    stats: CostStats | None = None,
    leaf: int = SYLVESTER_LEAF,
) -> np.ndarray:
    """Solve ``A F - F B = C`` for upper-triangular A (p x p) and B (q x q).

    Recursively halves the larger dimension.  Splitting A, the bottom row
    block is solved first and the top right-hand side is updated with
    ``-A12 F2``; splitting B, the left column block is solved first and the
    right-hand side of the rest is updated with ``+F1 B12``.  Blocks with
    both sides at most `leaf` are finished by elementwise back-substitution.

    Raises
    ------
    SingularSylvester
        If A and B share a diagonal value.
    """
    A = np.asarray(A, dtype=np.complex128, order="F")
    B = np.asarray(B, dtype=np.complex128, order="F")
    F = np.array(C, dtype=np.complex128, order="F", copy=True)
    p, q = A.shape[0], B.shape[0]
    if A.shape != (p, p) or B.shape != (q, q) or F.shape != (p, q):
        raise ValueError(f"shape mismatch: A {A.shape}, B {B.shape}, C {F.shape}")
    stats = stats if stats is not None else CostStats()
    _check_separation(np.diagonal(A), np.diagonal(B))
    _sylv_rec(A, B, F, 0, p, 0, q, stats, max(1, leaf), impl())
    return F


def _sylv_rec(A, B, F, i0, i1, j0, j1, stats, leaf, kern):
    p, q = i1 - i0, j1 - j0
    if p == 0 or q == 0:
        return
    if p <= leaf and q <= leaf:
        Fb = np.asfortranarray(F[i0:i1, j0:j1])
        try:
            stats.flops += kern.sylv_leaf(
                np.asfortranarray(A[i0:i1, i0:i1]), np.asfortranarray(B[j0:j1, j0:j1]), Fb
            )
        except ZeroDivisionError as exc:
            i, j = exc.args
            raise SingularSylvester(f"a[{i0 + i}] == b[{j0 + j}]") from None
        F[i0:i1, j0:j1] = Fb
        return
    if p >= q:
        m = i0 + (p + 1) // 2
        _sylv_rec(A, B, F, m, i1, j0, j1, stats, leaf, kern)
        block_mul_acc(
            BlockView(F, i0, m, j0, j1), BlockView(A, i0, m, m, i1), BlockView(F, m, i1, j0, j1),
            -1, stats,
        )
        _sylv_rec(A, B, F, i0, m, j0, j1, stats, leaf, kern)
    else:
        m = j0 + (q + 1) // 2
        _sylv_rec(A, B, F, i0, i1, j0, m, stats, leaf, kern)
        block_mul_acc(
            BlockView(F, i0, i1, m, j1), BlockView(F, i0, i1, j0, m), BlockView(B, j0, m, m, j1),
            1, stats,
        )
        _sylv_rec(A, B, F, i0, i1, m, j1, stats, leaf, kern)


def back_transport(U: np.ndarray, plan: ReorderPlan, stats: CostStats) -> None:
    """Undo the reordering similarity on `U` in place: ``U <- W^H U W``."""
    k = plan.k
    if k == 0:
        return
    cs = np.array([g.c for g in plan.rotations], dtype=np.float64)
    sn = np.array([g.s for g in plan.rotations], dtype=np.complex128)
    pos = np.array([g.position for g in plan.rotations], dtype=np.int64)
    impl().rotate_back(U, cs, sn, pos)
    stats.flops += 2 * ROT_PAIR * U.shape[0] * k


def parlett_sylvester_sign(T, stats: CostStats | None = None) -> SignResult:
    """Sign of T by sign reordering plus one triangular Sylvester solve.

    1. Reorder T unitarily so the n_minus negative eigenvalues come first.
    2. The diagonal blocks of the reordered sign are ``-I`` and ``+I``.
    3. Solve ``T11 F - F T22 = -2 T12`` for the off-diagonal block.
    4. Carry the result back through the recorded rotations.
    """
    T = as_triangular(T)
    stats = stats if stats is not None else CostStats()
    s = diag_signs(T)
    n = T.shape[0]
    n_minus = int(np.count_nonzero(s < 0))
    if n_minus in (0, n):
        U = np.asfortranarray(np.eye(n, dtype=np.complex128) * (1.0 if n_minus == 0 else -1.0))
        return SignResult(U, stats)
    Tr = T.copy(order="F")
    plan = reorder_by_sign(Tr, stats)
    U = np.zeros((n, n), dtype=np.complex128, order="F")
    U[:n_minus, :n_minus] = -np.eye(n_minus)
    U[n_minus:, n_minus:] = np.eye(n - n_minus)
    U[:n_minus, n_minus:] = solve_tri_sylvester(
        Tr[:n_minus, :n_minus], Tr[n_minus:, n_minus:], -2.0 * Tr[:n_minus, n_minus:], stats
    )
    stats.flops += 2 * n_minus * (n - n_minus)
    if plan.k:
        back_transport(U, plan, stats)
        lower = np.tril(U, -1)
        residue = np.linalg.norm(lower)
        if residue > 1e-12 * np.linalg.norm(U):
            warnings.warn(
                f"back-transported sign has lower-triangular residue {residue:.3e}",
                IllConditionedWarning,
                stacklevel=2,
            )
        U[np.tril_indices(n, -1)] = 0
    return SignResult(U, stats)


def block_parlett_sylvester(
    T,
    starts: Sequence[int],
    diag_fn: Callable[[np.ndarray, int], np.ndarray],
    stats: CostStats | None = None,
) -> np.ndarray:
    """Block Parlett recurrence for a given partition of the indices.

    Parameters
    ----------
    T : (n, n) array_like
        Upper-triangular matrix whose diagonal blocks have pairwise disjoint
        spectra.
    starts : sequence of int
        0-based, strictly increasing block starts, beginning with 0.
    diag_fn : callable
        ``diag_fn(T_ii, i)`` returns the function of the i-th diagonal block.

    Returns
    -------
    F : ndarray
        Off-diagonal blocks solve
        ``T_ii F_ij - F_ij T_jj = F_ii T_ij - T_ij F_jj + sum_k (F_ik T_kj - T_ik F_kj)``
        in the order j ascending, i descending.
    """
    T = as_triangular(T)
    stats = stats if stats is not None else CostStats()
    n = T.shape[0]
    starts = list(starts)
    if not starts or starts[0] != 0 or any(b <= a for a, b in zip(starts, starts[1:])) or starts[-1] >= n:
        raise ValueError(f"invalid block starts {starts} for n={n}")
    bounds = list(zip(starts, starts[1:] + [n]))
    m = len(bounds)
    F = np.zeros_like(T, order="F")
    for i, (a, b) in enumerate(bounds):
        F[a:b, a:b] = diag_fn(T[a:b, a:b].copy(order="F"), i)
    for j in range(1, m):
        c0, c1 = bounds[j]
        for i in range(j - 1, -1, -1):
            r0, r1 = bounds[i]
            rhs = BlockView(np.zeros((r1 - r0, c1 - c0), dtype=np.complex128, order="F"), 0, r1 - r0, 0, c1 - c0)
            block_mul_acc(rhs, BlockView(F, r0, r1, r0, r1), BlockView(T, r0, r1, c0, c1), 1, stats)
            block_mul_acc(rhs, BlockView(T, r0, r1, c0, c1), BlockView(F, c0, c1, c0, c1), -1, stats)
            for k in range(i + 1, j):
                k0, k1 = bounds[k]
                block_mul_acc(rhs, BlockView(F, r0, r1, k0, k1), BlockView(T, k0, k1, c0, c1), 1, stats)
                block_mul_acc(rhs, BlockView(T, r0, r1, k0, k1), BlockView(F, k0, k1, c0, c1), -1, stats)
            F[r0:r1, c0:c1] = solve_tri_sylvester(T[r0:r1, r0:r1], T[c0:c1, c0:c1], rhs.array, stats)
    return F
