"""Pure-Python kernels, used when the compiled core is unavailable.

Signatures, flop bookkeeping and element-access order match ``_core.pyx``
one for one.  Untraced paths use numpy inner products; traced paths walk
the same scalar loops as the compiled code so both backends emit the same
address stream.
"""
from __future__ import annotations

from collections import OrderedDict

import numpy as np

CMADD = 8
CADD = 2
EQ1_SCALAR = 17
EQ2_SCALAR = 2
PARLETT_SCALAR = 23
SYLV_SCALAR = 15
GEMM_TILE = 8


class LRUCache:
    """Fully associative LRU cache of `M` words with `B`-word lines."""

    def __init__(self, M: int, B: int = 1, size: int = 0):
        if B < 1 or M < B:
            raise ValueError(f"need M >= B >= 1, got M={M}, B={B}")
        self.capacity_words = M
        self.line_words = B
        self.cap_lines = M // B
        self._lines: OrderedDict[int, bool] = OrderedDict()
        self.misses = 0
        self.writebacks = 0
        self.accesses = 0

    @property
    def resident(self) -> int:
        return len(self._lines)

    def access(self, addr: int, write: bool = False) -> None:
        line = addr // self.line_words
        lines = self._lines
        self.accesses += 1
        if line in lines:
            lines.move_to_end(line, last=False)
            if write:
                lines[line] = True
            return
        self.misses += 1
        if len(lines) == self.cap_lines:
            _, dirty = lines.popitem(last=True)
            if dirty:
                self.writebacks += 1
        lines[line] = bool(write)
        lines.move_to_end(line, last=False)

    def replay(self, addrs, writes=None) -> None:
        if writes is None:
            for a in addrs:
                self.access(int(a), False)
        else:
            for a, w in zip(addrs, writes):
                self.access(int(a), bool(w))

    @property
    def sim_words(self) -> int:
        return self.misses * self.line_words


def _sgn(z) -> float:
    return 1.0 if z.real > 0 else -1.0


def higham_block(T, U, s, e, bmap=None, sim=None, tb=0, ub=0):
    n = T.shape[0]
    flops = eq1 = eq2 = 0
    tr = sim.access if sim is not None else None
    for i in range(s, e):
        if tr:
            tr(tb + i + i * n, False)
            tr(ub + i + i * n, True)
        U[i, i] = _sgn(T[i, i])
    for j in range(s + 1, e):
        for i in range(j - 1, s - 1, -1):
            ui = U[i, i].real
            uj = U[j, j].real
            if tr:
                tr(ub + i + i * n, False)
                tr(ub + j + j * n, False)
            m = j - i - 1
            if ui + uj == 0:
                if tr:
                    acc = 0j
                    for k in range(i + 1, j):
                        tr(ub + i + k * n, False)
                        tr(tb + k + j * n, False)
                        tr(tb + i + k * n, False)
                        tr(ub + k + j * n, False)
                        acc = acc + U[i, k] * T[k, j] - T[i, k] * U[k, j]
                    tr(tb + i + j * n, False)
                    tr(tb + i + i * n, False)
                    tr(tb + j + j * n, False)
                    tr(ub + i + j * n, True)
                else:
                    acc = U[i, i + 1:j] @ T[i + 1:j, j] - T[i, i + 1:j] @ U[i + 1:j, j]
                U[i, j] = (T[i, j] * (ui - uj) + acc) / (T[i, i] - T[j, j])
                eq1 += 1
                flops += 2 * CMADD * m + EQ1_SCALAR
                if bmap is not None:
                    bmap[i, j] = 1
            else:
                if tr:
                    acc = 0j
                    for k in range(i + 1, j):
                        tr(ub + i + k * n, False)
                        tr(ub + k + j * n, False)
                        acc = acc + U[i, k] * U[k, j]
                    tr(ub + i + j * n, True)
                else:
                    acc = U[i, i + 1:j] @ U[i + 1:j, j]
                U[i, j] = -acc / (ui + uj)
                eq2 += 1
                flops += CMADD * m + EQ2_SCALAR
                if bmap is not None:
                    bmap[i, j] = 2
    return flops, eq1, eq2


def parlett_block(T, F, s, e, sim=None, tb=0, fb=0):
    n = T.shape[0]
    flops = 0
    tr = sim.access if sim is not None else None
    for j in range(s + 1, e):
        for i in range(j - 1, s - 1, -1):
            if tr:
                acc = 0j
                for k in range(i + 1, j):
                    tr(fb + i + k * n, False)
                    tr(tb + k + j * n, False)
                    tr(tb + i + k * n, False)
                    tr(fb + k + j * n, False)
                    acc = acc + F[i, k] * T[k, j] - T[i, k] * F[k, j]
                tr(tb + i + j * n, False)
                tr(fb + i + i * n, False)
                tr(fb + j + j * n, False)
                tr(tb + i + i * n, False)
                tr(tb + j + j * n, False)
                tr(fb + i + j * n, True)
            else:
                acc = F[i, i + 1:j] @ T[i + 1:j, j] - T[i, i + 1:j] @ F[i + 1:j, j]
            F[i, j] = (T[i, j] * (F[i, i] - F[j, j]) + acc) / (T[i, i] - T[j, j])
            flops += 2 * CMADD * (j - i - 1) + PARLETT_SCALAR
    return flops


def offdiag_leaf(T, U, X, Y, i0, i1, j0, j1, bmap=None, sim=None, tb=0, ub=0, xb=0, yb=0):
    n = T.shape[0]
    flops = eq1 = eq2 = 0
    tr = sim.access if sim is not None else None
    for b in range(j0, j1):
        for a in range(i1 - 1, i0 - 1, -1):
            ua = U[a, a].real
            ubb = U[b, b].real
            if tr:
                tr(ub + a + a * n, False)
                tr(ub + b + b * n, False)
            m = (i1 - a - 1) + (b - j0)
            if ua + ubb == 0:
                acc = X[a, b]
                if tr:
                    tr(xb + a + b * n, False)
                    for k in list(range(a + 1, i1)) + list(range(j0, b)):
                        tr(ub + a + k * n, False)
                        tr(tb + k + b * n, False)
                        tr(tb + a + k * n, False)
                        tr(ub + k + b * n, False)
                        acc = acc + U[a, k] * T[k, b] - T[a, k] * U[k, b]
                    tr(tb + a + b * n, False)
                    tr(tb + a + a * n, False)
                    tr(tb + b + b * n, False)
                    tr(ub + a + b * n, True)
                else:
                    acc = acc + (U[a, a + 1:i1] @ T[a + 1:i1, b] - T[a, a + 1:i1] @ U[a + 1:i1, b])
                    acc = acc + (U[a, j0:b] @ T[j0:b, b] - T[a, j0:b] @ U[j0:b, b])
                U[a, b] = (T[a, b] * (ua - ubb) + acc) / (T[a, a] - T[b, b])
                eq1 += 1
                flops += 2 * CMADD * m + CADD + EQ1_SCALAR
                if bmap is not None:
                    bmap[a, b] = 1
            else:
                acc = Y[a, b]
                if tr:
                    tr(yb + a + b * n, False)
                    for k in list(range(a + 1, i1)) + list(range(j0, b)):
                        tr(ub + a + k * n, False)
                        tr(ub + k + b * n, False)
                        acc = acc + U[a, k] * U[k, b]
                    tr(ub + a + b * n, True)
                else:
                    acc = acc + U[a, a + 1:i1] @ U[a + 1:i1, b]
                    acc = acc + U[a, j0:b] @ U[j0:b, b]
                U[a, b] = -acc / (ua + ubb)
                eq2 += 1
                flops += CMADD * m + CADD + EQ2_SCALAR
                if bmap is not None:
                    bmap[a, b] = 2
    return flops, eq1, eq2


def ae_update(T, U, Z, a0, a1, b0, b1, k0, k1, sim=None, tb=0, ub=0, zb=0):
    n = T.shape[0]
    m = k1 - k0
    if m <= 0:
        return 0
    flops = 0
    tr = sim.access if sim is not None else None
    for b in range(b0, b1):
        for a in range(a0, a1):
            if tr:
                tr(ub + a + a * n, False)
                tr(ub + b + b * n, False)
            if U[a, a].real + U[b, b].real == 0:
                if tr:
                    acc = 0j
                    for k in range(k0, k1):
                        tr(ub + a + k * n, False)
                        tr(tb + k + b * n, False)
                        tr(tb + a + k * n, False)
                        tr(ub + k + b * n, False)
                        acc = acc + U[a, k] * T[k, b] - T[a, k] * U[k, b]
                else:
                    acc = U[a, k0:k1] @ T[k0:k1, b] - T[a, k0:k1] @ U[k0:k1, b]
                flops += 2 * CMADD * m + CADD
            else:
                if tr:
                    acc = 0j
                    for k in range(k0, k1):
                        tr(ub + a + k * n, False)
                        tr(ub + k + b * n, False)
                        acc = acc + U[a, k] * U[k, b]
                else:
                    acc = U[a, k0:k1] @ U[k0:k1, b]
                flops += CMADD * m + CADD
            if tr:
                tr(zb + a + b * n, False)
                tr(zb + a + b * n, True)
            Z[a, b] = Z[a, b] + acc
    return flops


def _gemm_rec(C, cb, cr, cc, A, ab, ar, ac, B, bb, br, bc, p, q, r, alpha, tr, n):
    if p <= 0 or q <= 0 or r <= 0:
        return
    if p <= GEMM_TILE and q <= GEMM_TILE and r <= GEMM_TILE:
        for j in range(q):
            for i in range(p):
                tr(cb + (cr + i) + (cc + j) * n, False)
                acc = 0j
                for k in range(r):
                    tr(ab + (ar + i) + (ac + k) * n, False)
                    tr(bb + (br + k) + (bc + j) * n, False)
                    acc = acc + A[ar + i, ac + k] * B[br + k, bc + j]
                C[cr + i, cc + j] = C[cr + i, cc + j] + alpha * acc
                tr(cb + (cr + i) + (cc + j) * n, True)
        return
    if p >= q and p >= r:
        h = (p + 1) // 2
        _gemm_rec(C, cb, cr, cc, A, ab, ar, ac, B, bb, br, bc, h, q, r, alpha, tr, n)
        _gemm_rec(C, cb, cr + h, cc, A, ab, ar + h, ac, B, bb, br, bc, p - h, q, r, alpha, tr, n)
    elif q >= r:
        h = (q + 1) // 2
        _gemm_rec(C, cb, cr, cc, A, ab, ar, ac, B, bb, br, bc, p, h, r, alpha, tr, n)
        _gemm_rec(C, cb, cr, cc + h, A, ab, ar, ac, B, bb, br, bc + h, p, q - h, r, alpha, tr, n)
    else:
        h = (r + 1) // 2
        _gemm_rec(C, cb, cr, cc, A, ab, ar, ac, B, bb, br, bc, p, q, h, alpha, tr, n)
        _gemm_rec(C, cb, cr, cc, A, ab, ar, ac + h, B, bb, br + h, bc, p, q, r - h, alpha, tr, n)


def gemm_traced(C, cb, cr, cc, A, ab, ar, ac, B, bb, br, bc, p, q, r, alpha, sim):
    _gemm_rec(C, cb, cr, cc, A, ab, ar, ac, B, bb, br, bc, p, q, r, complex(alpha), sim.access, C.shape[0])


def sylv_leaf(A, B, C):
    p = A.shape[0]
    q = B.shape[0]
    flops = 0
    for j in range(q):
        for i in range(p - 1, -1, -1):
            acc = C[i, j] - A[i, i + 1:p] @ C[i + 1:p, j] + C[i, :j] @ B[:j, j]
            d = A[i, i] - B[j, j]
            if d == 0:
                raise ZeroDivisionError(i, j)
            C[i, j] = acc / d
            flops += CMADD * ((p - i - 1) + j) + SYLV_SCALAR
    return flops


def _lartg(f: complex, g: complex):
    af = abs(f)
    ag = abs(g)
    if ag == 0:
        return 1.0, 0j
    if af == 0:
        return 0.0, g.conjugate() / ag
    h = np.hypot(af, ag)
    return af / h, (f / af) * g.conjugate() / h


def givens_swap(T, j):
    a = T[j, j]
    d = T[j + 1, j + 1]
    cs, sn = _lartg(complex(T[j, j + 1]), complex(d - a))
    x = T[j, j:].copy()
    y = T[j + 1, j:].copy()
    T[j, j:] = cs * x + sn * y
    T[j + 1, j:] = cs * y - sn.conjugate() * x
    x = T[:j + 2, j].copy()
    y = T[:j + 2, j + 1].copy()
    T[:j + 2, j] = cs * x + sn.conjugate() * y
    T[:j + 2, j + 1] = cs * y - sn * x
    T[j, j] = d
    T[j + 1, j + 1] = a
    T[j + 1, j] = 0
    return cs, sn


def rotate_back(A, cs, sn, pos):
    for t in range(len(cs) - 1, -1, -1):
        c = cs[t]
        s = complex(sn[t])
        j = int(pos[t])
        x = A[j, :].copy()
        y = A[j + 1, :].copy()
        A[j, :] = c * x - s * y
        A[j + 1, :] = s.conjugate() * x + c * y
        x = A[:, j].copy()
        y = A[:, j + 1].copy()
        A[:, j] = c * x - s.conjugate() * y
        A[:, j + 1] = s * x + c * y
