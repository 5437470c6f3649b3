"""Cache-efficient recursive Parlett-Higham algorithms.

Both variants recurse over the nested partition of :func:`make_partition`.
A diagonal block is split into two diagonal children followed by the
off-diagonal child between them.  An off-diagonal block ``(I, J)`` with
halves ``I = I1 + I2`` and ``J = J1 + J2`` is finished in the order

    (I2, J1); acc(I1, J1) += over I2
    (I1, J1); acc(I2, J2) += over J1
    (I2, J2); acc(I1, J2) += over I2 and over J1
    (I1, J2)

where ``acc(A, B) += over K`` adds ``sum_{k in K} (u_ak t_kb - t_ak u_kb)``
to X and ``sum_{k in K} u_ak u_kb`` to Y.  When entering ``(I, J)`` the
accumulators hold the sums over every k strictly between I and J; leaf
blocks add the sums over k inside I and J themselves.

The matrix-multiply variant keeps X and Y and forms both with block
multiplies.  The arithmetic-efficient variant keeps a single Z and a custom
kernel adds per element only the sum that element's branch will use.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classic import SignResult
from .core import BlockView, as_triangular, diag_signs, split_point
from .kernels import CMADD, CADD, CostStats, Tracer, block_mul_acc, impl
from . import _pykernels

__all__ = ["DEFAULT_BASE", "DebugReport", "sign_recursive_mm", "sign_recursive_ae"]

DEFAULT_BASE = 16


@dataclass
class DebugReport:
    """Findings of a debug run.

    ``max_acc_dev`` is the largest accumulated-vs-direct deviation of a leaf
    sum, relative to the sum of absolute values of its terms.
    """

    max_acc_dev: float = 0.0
    read_violations: int = 0
    leaf_checks: int = 0
    violations: list = field(default_factory=list)


class _Run:
    def __init__(self, T, base, variant, stats, tracer, record, debug):
        self.T = T
        n = T.shape[0]
        self.n = n
        self.base = base
        self.variant = variant
        self.stats = stats
        self.tracer = tracer
        self.kern = impl()
        self.U = np.zeros_like(T, order="F")
        self.X = np.zeros_like(T, order="F")
        self.Y = np.zeros_like(T, order="F") if variant == "mm" else self.X
        self.bmap = np.zeros((n, n), dtype=np.int8) if record else None
        self.eq1 = 0
        self.eq2 = 0
        self.debug = DebugReport() if debug else None
        self.done = np.zeros((n, n), dtype=bool) if debug else None
        if tracer is not None:
            self.tb = tracer.base(T)
            self.ub = tracer.base(self.U)
            self.xb = tracer.base(self.X)
            self.yb = tracer.base(self.Y)
        else:
            self.tb = self.ub = self.xb = self.yb = 0

    def _sim(self):
        return self.tracer.cache if self.tracer is not None else None

    # -- recursion ---------------------------------------------------------

    def diagonal(self, s, e):
        if e - s <= self.base:
            if self.debug is not None:
                self._debug_diag_leaf(s, e)
                return
            flops, eq1, eq2 = self.kern.higham_block(
                self.T, self.U, s, e, self.bmap, self._sim(), self.tb, self.ub
            )
            self._book(flops, eq1, eq2)
            return
        m = split_point(s, e)
        self.diagonal(s, m)
        self.diagonal(m, e)
        self.offdiagonal(s, m, m, e)

    def offdiagonal(self, i0, i1, j0, j1):
        split_i = i1 - i0 > self.base
        split_j = j1 - j0 > self.base
        if not split_i and not split_j:
            self.leaf(i0, i1, j0, j1)
            return
        if split_i and split_j:
            im = split_point(i0, i1)
            jm = split_point(j0, j1)
            self.offdiagonal(im, i1, j0, jm)
            self.update(i0, im, j0, jm, im, i1)
            self.offdiagonal(i0, im, j0, jm)
            self.update(im, i1, jm, j1, j0, jm)
            self.offdiagonal(im, i1, jm, j1)
            self.update(i0, im, jm, j1, im, i1)
            self.update(i0, im, jm, j1, j0, jm)
            self.offdiagonal(i0, im, jm, j1)
        elif split_i:
            im = split_point(i0, i1)
            self.offdiagonal(im, i1, j0, j1)
            self.update(i0, im, j0, j1, im, i1)
            self.offdiagonal(i0, im, j0, j1)
        else:
            jm = split_point(j0, j1)
            self.offdiagonal(i0, i1, j0, jm)
            self.update(i0, i1, jm, j1, j0, jm)
            self.offdiagonal(i0, i1, jm, j1)

    def update(self, a0, a1, b0, b1, k0, k1):
        """Accumulate the contribution of ``k in [k0, k1)`` into rows
        ``[a0, a1)`` and columns ``[b0, b1)``."""
        if self.done is not None:
            self._check_ready(a0, a1, k0, k1, "update")
            self._check_ready(k0, k1, b0, b1, "update")
        T, U, X, Y = self.T, self.U, self.X, self.Y
        if self.variant == "mm":
            st, tr = self.stats, self.tracer
            Xb = BlockView(X, a0, a1, b0, b1)
            block_mul_acc(Xb, BlockView(U, a0, a1, k0, k1), BlockView(T, k0, k1, b0, b1), 1, st, tr)
            block_mul_acc(Xb, BlockView(T, a0, a1, k0, k1), BlockView(U, k0, k1, b0, b1), -1, st, tr)
            block_mul_acc(
                BlockView(Y, a0, a1, b0, b1), BlockView(U, a0, a1, k0, k1), BlockView(U, k0, k1, b0, b1),
                1, st, tr,
            )
        else:
            self.stats.flops += self.kern.ae_update(
                T, U, X, a0, a1, b0, b1, k0, k1, self._sim(), self.tb, self.ub, self.xb
            )

    def leaf(self, i0, i1, j0, j1):
        if self.debug is not None:
            self._debug_offdiag_leaf(i0, i1, j0, j1)
            return
        flops, eq1, eq2 = self.kern.offdiag_leaf(
            self.T, self.U, self.X, self.Y, i0, i1, j0, j1, self.bmap, self._sim(),
            self.tb, self.ub, self.xb, self.yb,
        )
        self._book(flops, eq1, eq2)

    def _book(self, flops, eq1, eq2):
        self.stats.flops += flops
        self.eq1 += eq1
        self.eq2 += eq2

    # -- debug instrumentation ---------------------------------------------

    def _check_ready(self, r0, r1, c0, c1, where):
        block = self.done[r0:r1, c0:c1]
        tri = np.triu(np.ones(block.shape, dtype=bool), c0 - r0)
        missing = int(np.count_nonzero(tri & ~block))
        if missing:
            self.debug.read_violations += missing
            self.debug.violations.append((where, r0, r1, c0, c1))

    def _check_read(self, pairs, where):
        for i, j in pairs:
            if not self.done[i, j]:
                self.debug.read_violations += 1
                self.debug.violations.append((where, i, j))

    def _debug_diag_leaf(self, s, e):
        T, U = self.T, self.U
        for i in range(s, e):
            U[i, i] = 1.0 if T[i, i].real > 0 else -1.0
            self.done[i, i] = True
        for j in range(s + 1, e):
            for i in range(j - 1, s - 1, -1):
                ks = range(i + 1, j)
                self._check_read([(i, k) for k in ks] + [(k, j) for k in ks] + [(i, i), (j, j)], "diag")
                self._element(i, j, 0j, 0j, ks, leaf=False)

    def _debug_offdiag_leaf(self, i0, i1, j0, j1):
        for b in range(j0, j1):
            for a in range(i1 - 1, i0 - 1, -1):
                local = list(range(a + 1, i1)) + list(range(j0, b))
                # Every k in (a, b) must be final before u_ab is formed.
                ks = range(a + 1, b)
                self._check_read([(a, k) for k in ks] + [(k, b) for k in ks] + [(a, a), (b, b)], "leaf")
                self._check_accumulators(a, b, local)
                self._element(a, b, self.X[a, b], self.Y[a, b], local, leaf=True)

    def _check_accumulators(self, a, b, local):
        T, U = self.T, self.U
        ks = np.arange(a + 1, b)
        between = np.setdiff1d(ks, np.asarray(local, dtype=int))
        opposite = U[a, a].real + U[b, b].real == 0
        sums = []
        if self.variant == "mm" or opposite:
            terms = U[a, between] * T[between, b] - T[a, between] * U[between, b]
            scale = np.sum(np.abs(U[a, between] * T[between, b]) + np.abs(T[a, between] * U[between, b]))
            sums.append((self.X[a, b], terms.sum(), scale))
        if self.variant == "mm" or not opposite:
            terms = U[a, between] * U[between, b]
            sums.append((self.Y[a, b], terms.sum(), np.sum(np.abs(terms))))
        for acc, direct, scale in sums:
            dev = abs(acc - direct) / max(scale, np.finfo(float).tiny)
            if scale == 0 and acc == 0:
                dev = 0.0
            self.debug.max_acc_dev = max(self.debug.max_acc_dev, float(dev))
        self.debug.leaf_checks += 1

    def _element(self, a, b, xacc, yacc, ks, leaf):
        T, U = self.T, self.U
        ks = np.asarray(list(ks), dtype=int)
        m = ks.size
        ua, ub = U[a, a].real, U[b, b].real
        local_flops = CADD if leaf else 0
        if ua + ub == 0:
            acc = xacc + np.sum(U[a, ks] * T[ks, b] - T[a, ks] * U[ks, b])
            U[a, b] = (T[a, b] * (ua - ub) + acc) / (T[a, a] - T[b, b])
            self.stats.flops += 2 * CMADD * m + _pykernels.EQ1_SCALAR + local_flops
            self.eq1 += 1
            code = 1
        else:
            acc = yacc + np.sum(U[a, ks] * U[ks, b])
            U[a, b] = -acc / (ua + ub)
            self.stats.flops += CMADD * m + _pykernels.EQ2_SCALAR + local_flops
            self.eq2 += 1
            code = 2
        if self.bmap is not None:
            self.bmap[a, b] = code
        self.done[a, b] = True


def _run(T, base, variant, stats, record_branches, tracer, debug):
    T = as_triangular(T)
    if base < 1:
        raise ValueError(f"base must be >= 1, got {base}")
    stats = stats if stats is not None else CostStats()
    diag_signs(T)
    run = _Run(T, base, variant, stats, tracer, record_branches, debug)
    run.diagonal(0, T.shape[0])
    res = SignResult(run.U, stats, (run.eq1, run.eq2), run.bmap)
    if debug:
        res.debug = run.debug
    return res


def sign_recursive_mm(
    T,
    base: int = DEFAULT_BASE,
    stats: CostStats | None = None,
    *,
    record_branches: bool = False,
    tracer: Tracer | None = None,
    debug: bool = False,
) -> SignResult:
    """Recursive Parlett-Higham sign with two accumulators updated by block multiplies.

    Parameters
    ----------
    T : (n, n) array_like
        Upper-triangular matrix without purely imaginary diagonal entries.
    base : int
        Blocks of dimension at most `base` are finished elementwise.
    debug : bool
        Check, at every leaf element, that the accumulated sums match direct
        summation over the final U and that every U entry read is already
        final.  The findings are attached as ``result.debug``.
    """
    return _run(T, base, "mm", stats, record_branches, tracer, debug)


def sign_recursive_ae(
    T,
    base: int = DEFAULT_BASE,
    stats: CostStats | None = None,
    *,
    record_branches: bool = False,
    tracer: Tracer | None = None,
    debug: bool = False,
) -> SignResult:
    """Recursive Parlett-Higham sign with a single accumulator.

    Same recursion as :func:`sign_recursive_mm`, but each update adds per
    element only the sum that element's branch needs (decided from the two
    diagonal signs), roughly halving the arithmetic at the cost of a
    branching kernel in place of plain block multiplies.
    """
    return _run(T, base, "ae", stats, record_branches, tracer, debug)
