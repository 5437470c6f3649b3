# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: elementwise recurrences, leaf solves and the LRU simulator.

Every kernel has a pure-Python twin in ``_pykernels`` with the same
signature, the same flop bookkeeping and the same element-access order, so
traced runs produce identical address streams on both backends.

Matrices are full n-by-n Fortran-ordered complex128 arrays; logical word
addresses are ``slot_base + row + col * n``.
"""
import numpy as np
cimport numpy as cnp

from libc.math cimport sqrt, fabs, hypot

ctypedef double complex cplx

cdef long long CMADD = 8
cdef long long CADD = 2
cdef long long EQ1_SCALAR = 17
cdef long long EQ2_SCALAR = 2
cdef long long PARLETT_SCALAR = 23
cdef long long SYLV_SCALAR = 15
cdef Py_ssize_t GEMM_TILE = 8


cdef class LRUCache:
    """Fully associative LRU cache of `M` words with `B`-word lines.

    `size` bounds the logical address space in words.  Misses count line
    loads; dirty lines evicted count as writebacks.
    """

    cdef readonly long long capacity_words, line_words, cap_lines
    cdef readonly long long misses, writebacks, accesses, resident
    cdef long long head, tail
    cdef long long[::1] prev
    cdef long long[::1] nxt
    cdef signed char[::1] state

    def __init__(self, long long M, long long B=1, long long size=0):
        if B < 1 or M < B:
            raise ValueError(f"need M >= B >= 1, got M={M}, B={B}")
        self.capacity_words = M
        self.line_words = B
        self.cap_lines = M // B
        nlines = max(1, (size + B - 1) // B)
        self.prev = np.full(nlines, -1, dtype=np.int64)
        self.nxt = np.full(nlines, -1, dtype=np.int64)
        self.state = np.zeros(nlines, dtype=np.int8)
        self.head = -1
        self.tail = -1
        self.misses = 0
        self.writebacks = 0
        self.accesses = 0
        self.resident = 0

    cdef void _grow(self, long long line):
        cdef long long n = self.state.shape[0]
        cdef long long m = max(2 * n, line + 1)
        p = np.full(m, -1, dtype=np.int64)
        q = np.full(m, -1, dtype=np.int64)
        s = np.zeros(m, dtype=np.int8)
        p[:n] = self.prev
        q[:n] = self.nxt
        s[:n] = self.state
        self.prev = p
        self.nxt = q
        self.state = s

    cdef inline void _unlink(self, long long x):
        cdef long long p = self.prev[x]
        cdef long long q = self.nxt[x]
        if p >= 0:
            self.nxt[p] = q
        else:
            self.head = q
        if q >= 0:
            self.prev[q] = p
        else:
            self.tail = p

    cdef inline void _push_front(self, long long x):
        self.prev[x] = -1
        self.nxt[x] = self.head
        if self.head >= 0:
            self.prev[self.head] = x
        self.head = x
        if self.tail < 0:
            self.tail = x

    cdef inline void touch(self, long long addr, bint write):
        cdef long long line = addr // self.line_words
        cdef long long victim
        self.accesses += 1
        if line >= self.state.shape[0]:
            self._grow(line)
        if self.state[line]:
            if self.head != line:
                self._unlink(line)
                self._push_front(line)
            if write:
                self.state[line] = 2
            return
        self.misses += 1
        if self.resident == self.cap_lines:
            victim = self.tail
            self._unlink(victim)
            if self.state[victim] == 2:
                self.writebacks += 1
            self.state[victim] = 0
            self.resident -= 1
        self._push_front(line)
        self.state[line] = 2 if write else 1
        self.resident += 1

    def access(self, long long addr, bint write=False):
        self.touch(addr, write)

    def replay(self, addrs, writes=None):
        cdef long long[::1] a = np.ascontiguousarray(addrs, dtype=np.int64)
        cdef signed char[::1] w
        cdef Py_ssize_t t
        if writes is None:
            for t in range(a.shape[0]):
                self.touch(a[t], False)
        else:
            w = np.ascontiguousarray(writes, dtype=np.int8)
            for t in range(a.shape[0]):
                self.touch(a[t], w[t] != 0)

    @property
    def sim_words(self):
        return self.misses * self.line_words


cdef inline void _t(LRUCache sim, long long base, Py_ssize_t n, Py_ssize_t r, Py_ssize_t c, bint w):
    sim.touch(base + r + c * n, w)


cdef inline double _sgn(cplx z):
    return 1.0 if z.real > 0 else -1.0


# --------------------------------------------------------------------------
# Elementwise recurrences


def higham_block(cplx[::1, :] T, cplx[::1, :] U, Py_ssize_t s, Py_ssize_t e,
                 signed char[:, ::1] bmap=None, LRUCache sim=None,
                 long long tb=0, long long ub=0):
    """Parlett-Higham recurrence on the diagonal block ``[s, e)``."""
    cdef Py_ssize_t n = T.shape[0], i, j, k
    cdef long long flops = 0, eq1 = 0, eq2 = 0
    cdef double ui, uj
    cdef cplx acc
    cdef bint traced = sim is not None
    cdef bint record = bmap is not None
    for i in range(s, e):
        if traced:
            _t(sim, tb, n, i, i, 0)
            _t(sim, ub, n, i, i, 1)
        U[i, i] = _sgn(T[i, i])
    for j in range(s + 1, e):
        for i in range(j - 1, s - 1, -1):
            ui = U[i, i].real
            uj = U[j, j].real
            if traced:
                _t(sim, ub, n, i, i, 0)
                _t(sim, ub, n, j, j, 0)
            acc = 0
            if ui + uj == 0:
                if traced:
                    for k in range(i + 1, j):
                        _t(sim, ub, n, i, k, 0)
                        _t(sim, tb, n, k, j, 0)
                        _t(sim, tb, n, i, k, 0)
                        _t(sim, ub, n, k, j, 0)
                        acc = acc + U[i, k] * T[k, j] - T[i, k] * U[k, j]
                    _t(sim, tb, n, i, j, 0)
                    _t(sim, tb, n, i, i, 0)
                    _t(sim, tb, n, j, j, 0)
                    _t(sim, ub, n, i, j, 1)
                else:
                    for k in range(i + 1, j):
                        acc = acc + U[i, k] * T[k, j] - T[i, k] * U[k, j]
                U[i, j] = (T[i, j] * (ui - uj) + acc) / (T[i, i] - T[j, j])
                eq1 += 1
                flops += 2 * CMADD * (j - i - 1) + EQ1_SCALAR
                if record:
                    bmap[i, j] = 1
            else:
                if traced:
                    for k in range(i + 1, j):
                        _t(sim, ub, n, i, k, 0)
                        _t(sim, ub, n, k, j, 0)
                        acc = acc + U[i, k] * U[k, j]
                    _t(sim, ub, n, i, j, 1)
                else:
                    for k in range(i + 1, j):
                        acc = acc + U[i, k] * U[k, j]
                U[i, j] = -acc / (ui + uj)
                eq2 += 1
                flops += CMADD * (j - i - 1) + EQ2_SCALAR
                if record:
                    bmap[i, j] = 2
    return flops, eq1, eq2


def parlett_block(cplx[::1, :] T, cplx[::1, :] F, Py_ssize_t s, Py_ssize_t e,
                  LRUCache sim=None, long long tb=0, long long fb=0):
    """Parlett commutation recurrence on ``[s, e)``; the diagonal of F is preset."""
    cdef Py_ssize_t n = T.shape[0], i, j, k
    cdef long long flops = 0
    cdef cplx acc
    cdef bint traced = sim is not None
    for j in range(s + 1, e):
        for i in range(j - 1, s - 1, -1):
            acc = 0
            if traced:
                for k in range(i + 1, j):
                    _t(sim, fb, n, i, k, 0)
                    _t(sim, tb, n, k, j, 0)
                    _t(sim, tb, n, i, k, 0)
                    _t(sim, fb, n, k, j, 0)
                    acc = acc + F[i, k] * T[k, j] - T[i, k] * F[k, j]
                _t(sim, tb, n, i, j, 0)
                _t(sim, fb, n, i, i, 0)
                _t(sim, fb, n, j, j, 0)
                _t(sim, tb, n, i, i, 0)
                _t(sim, tb, n, j, j, 0)
                _t(sim, fb, n, i, j, 1)
            else:
                for k in range(i + 1, j):
                    acc = acc + F[i, k] * T[k, j] - T[i, k] * F[k, j]
            F[i, j] = (T[i, j] * (F[i, i] - F[j, j]) + acc) / (T[i, i] - T[j, j])
            flops += 2 * CMADD * (j - i - 1) + PARLETT_SCALAR
    return flops


def offdiag_leaf(cplx[::1, :] T, cplx[::1, :] U, cplx[::1, :] X, cplx[::1, :] Y,
                 Py_ssize_t i0, Py_ssize_t i1, Py_ssize_t j0, Py_ssize_t j1,
                 signed char[:, ::1] bmap=None, LRUCache sim=None,
                 long long tb=0, long long ub=0, long long xb=0, long long yb=0):
    """Finish the off-diagonal block ``[i0, i1) x [j0, j1)`` elementwise.

    X and Y hold the sums over all k strictly between the row and column
    ranges; the sums over k inside the two ranges are added here.  Only the
    sum each element's branch needs is formed.
    """
    cdef Py_ssize_t n = T.shape[0], a, b, k
    cdef long long flops = 0, eq1 = 0, eq2 = 0, m
    cdef double ua, ub_
    cdef cplx acc
    cdef bint traced = sim is not None
    cdef bint record = bmap is not None
    for b in range(j0, j1):
        for a in range(i1 - 1, i0 - 1, -1):
            ua = U[a, a].real
            ub_ = U[b, b].real
            if traced:
                _t(sim, ub, n, a, a, 0)
                _t(sim, ub, n, b, b, 0)
            m = (i1 - a - 1) + (b - j0)
            if ua + ub_ == 0:
                acc = X[a, b]
                if traced:
                    _t(sim, xb, n, a, b, 0)
                    for k in range(a + 1, i1):
                        _t(sim, ub, n, a, k, 0)
                        _t(sim, tb, n, k, b, 0)
                        _t(sim, tb, n, a, k, 0)
                        _t(sim, ub, n, k, b, 0)
                        acc = acc + U[a, k] * T[k, b] - T[a, k] * U[k, b]
                    for k in range(j0, b):
                        _t(sim, ub, n, a, k, 0)
                        _t(sim, tb, n, k, b, 0)
                        _t(sim, tb, n, a, k, 0)
                        _t(sim, ub, n, k, b, 0)
                        acc = acc + U[a, k] * T[k, b] - T[a, k] * U[k, b]
                    _t(sim, tb, n, a, b, 0)
                    _t(sim, tb, n, a, a, 0)
                    _t(sim, tb, n, b, b, 0)
                    _t(sim, ub, n, a, b, 1)
                else:
                    for k in range(a + 1, i1):
                        acc = acc + U[a, k] * T[k, b] - T[a, k] * U[k, b]
                    for k in range(j0, b):
                        acc = acc + U[a, k] * T[k, b] - T[a, k] * U[k, b]
                U[a, b] = (T[a, b] * (ua - ub_) + acc) / (T[a, a] - T[b, b])
                eq1 += 1
                flops += 2 * CMADD * m + CADD + EQ1_SCALAR
                if record:
                    bmap[a, b] = 1
            else:
                acc = Y[a, b]
                if traced:
                    _t(sim, yb, n, a, b, 0)
                    for k in range(a + 1, i1):
                        _t(sim, ub, n, a, k, 0)
                        _t(sim, ub, n, k, b, 0)
                        acc = acc + U[a, k] * U[k, b]
                    for k in range(j0, b):
                        _t(sim, ub, n, a, k, 0)
                        _t(sim, ub, n, k, b, 0)
                        acc = acc + U[a, k] * U[k, b]
                    _t(sim, ub, n, a, b, 1)
                else:
                    for k in range(a + 1, i1):
                        acc = acc + U[a, k] * U[k, b]
                    for k in range(j0, b):
                        acc = acc + U[a, k] * U[k, b]
                U[a, b] = -acc / (ua + ub_)
                eq2 += 1
                flops += CMADD * m + CADD + EQ2_SCALAR
                if record:
                    bmap[a, b] = 2
    return flops, eq1, eq2


def ae_update(cplx[::1, :] T, cplx[::1, :] U, cplx[::1, :] Z,
              Py_ssize_t a0, Py_ssize_t a1, Py_ssize_t b0, Py_ssize_t b1,
              Py_ssize_t k0, Py_ssize_t k1, LRUCache sim=None,
              long long tb=0, long long ub=0, long long zb=0):
    """Add to ``Z[a0:a1, b0:b1]`` only the partial sum over ``k0 <= k < k1``
    that each element's branch needs (commutation sum or involution sum)."""
    cdef Py_ssize_t n = T.shape[0], a, b, k
    cdef long long flops = 0, m = k1 - k0
    cdef cplx acc
    cdef bint traced = sim is not None
    if m <= 0:
        return 0
    for b in range(b0, b1):
        for a in range(a0, a1):
            if traced:
                _t(sim, ub, n, a, a, 0)
                _t(sim, ub, n, b, b, 0)
            acc = 0
            if U[a, a].real + U[b, b].real == 0:
                if traced:
                    for k in range(k0, k1):
                        _t(sim, ub, n, a, k, 0)
                        _t(sim, tb, n, k, b, 0)
                        _t(sim, tb, n, a, k, 0)
                        _t(sim, ub, n, k, b, 0)
                        acc = acc + U[a, k] * T[k, b] - T[a, k] * U[k, b]
                else:
                    for k in range(k0, k1):
                        acc = acc + U[a, k] * T[k, b] - T[a, k] * U[k, b]
                flops += 2 * CMADD * m + CADD
            else:
                if traced:
                    for k in range(k0, k1):
                        _t(sim, ub, n, a, k, 0)
                        _t(sim, ub, n, k, b, 0)
                        acc = acc + U[a, k] * U[k, b]
                else:
                    for k in range(k0, k1):
                        acc = acc + U[a, k] * U[k, b]
                flops += CMADD * m + CADD
            if traced:
                _t(sim, zb, n, a, b, 0)
                _t(sim, zb, n, a, b, 1)
            Z[a, b] = Z[a, b] + acc
    return flops


# --------------------------------------------------------------------------
# Traced cache-oblivious multiply


cdef void _gemm_rec(cplx[::1, :] C, long long cb, Py_ssize_t cr, Py_ssize_t cc,
                    cplx[::1, :] A, long long ab, Py_ssize_t ar, Py_ssize_t ac,
                    cplx[::1, :] B, long long bb, Py_ssize_t br, Py_ssize_t bc,
                    Py_ssize_t p, Py_ssize_t q, Py_ssize_t r, cplx alpha,
                    LRUCache sim, Py_ssize_t n):
    cdef Py_ssize_t i, j, k, h
    cdef cplx acc
    if p <= 0 or q <= 0 or r <= 0:
        return
    if p <= GEMM_TILE and q <= GEMM_TILE and r <= GEMM_TILE:
        for j in range(q):
            for i in range(p):
                _t(sim, cb, n, cr + i, cc + j, 0)
                acc = 0
                for k in range(r):
                    _t(sim, ab, n, ar + i, ac + k, 0)
                    _t(sim, bb, n, br + k, bc + j, 0)
                    acc = acc + A[ar + i, ac + k] * B[br + k, bc + j]
                C[cr + i, cc + j] = C[cr + i, cc + j] + alpha * acc
                _t(sim, cb, n, cr + i, cc + j, 1)
        return
    if p >= q and p >= r:
        h = (p + 1) // 2
        _gemm_rec(C, cb, cr, cc, A, ab, ar, ac, B, bb, br, bc, h, q, r, alpha, sim, n)
        _gemm_rec(C, cb, cr + h, cc, A, ab, ar + h, ac, B, bb, br, bc, p - h, q, r, alpha, sim, n)
    elif q >= r:
        h = (q + 1) // 2
        _gemm_rec(C, cb, cr, cc, A, ab, ar, ac, B, bb, br, bc, p, h, r, alpha, sim, n)
        _gemm_rec(C, cb, cr, cc + h, A, ab, ar, ac, B, bb, br, bc + h, p, q - h, r, alpha, sim, n)
    else:
        h = (r + 1) // 2
        _gemm_rec(C, cb, cr, cc, A, ab, ar, ac, B, bb, br, bc, p, q, h, alpha, sim, n)
        _gemm_rec(C, cb, cr, cc, A, ab, ar, ac + h, B, bb, br + h, bc, p, q, r - h, alpha, sim, n)


def gemm_traced(cplx[::1, :] C, long long cb, Py_ssize_t cr, Py_ssize_t cc,
                cplx[::1, :] A, long long ab, Py_ssize_t ar, Py_ssize_t ac,
                cplx[::1, :] B, long long bb, Py_ssize_t br, Py_ssize_t bc,
                Py_ssize_t p, Py_ssize_t q, Py_ssize_t r, cplx alpha, LRUCache sim):
    """``C[block] += alpha * A[block] @ B[block]`` by cache-oblivious recursion,
    logging every element access to `sim`."""
    _gemm_rec(C, cb, cr, cc, A, ab, ar, ac, B, bb, br, bc, p, q, r, alpha, sim, C.shape[0])


# --------------------------------------------------------------------------
# Sylvester leaf and Givens rotations


def sylv_leaf(cplx[::1, :] A, cplx[::1, :] B, cplx[::1, :] C):
    """Overwrite C with F solving ``A F - F B = C`` (A, B upper triangular)."""
    cdef Py_ssize_t p = A.shape[0], q = B.shape[0], i, j, k
    cdef long long flops = 0
    cdef cplx acc, d
    for j in range(q):
        for i in range(p - 1, -1, -1):
            acc = C[i, j]
            for k in range(i + 1, p):
                acc = acc - A[i, k] * C[k, j]
            for k in range(j):
                acc = acc + C[i, k] * B[k, j]
            d = A[i, i] - B[j, j]
            if d == 0:
                raise ZeroDivisionError(i, j)
            C[i, j] = acc / d
            flops += CMADD * ((p - i - 1) + j) + SYLV_SCALAR
    return flops


cdef inline void _lartg(cplx f, cplx g, double* cs, cplx* sn):
    cdef double af = hypot(f.real, f.imag)
    cdef double ag = hypot(g.real, g.imag)
    cdef double h
    if ag == 0:
        cs[0] = 1.0
        sn[0] = 0
    elif af == 0:
        cs[0] = 0.0
        sn[0] = g.conjugate() / ag
    else:
        h = hypot(af, ag)
        cs[0] = af / h
        sn[0] = (f / af) * g.conjugate() / h


def givens_swap(cplx[::1, :] T, Py_ssize_t j):
    """Swap diagonal entries j and j+1 of T by a unitary similarity.

    Returns ``(c, s)`` of the rotation ``G = [[c, s], [-conj(s), c]]`` with
    ``T <- G T G^H`` acting on rows/columns j, j+1.
    """
    cdef Py_ssize_t n = T.shape[0], k
    cdef cplx a = T[j, j], d = T[j + 1, j + 1], x, y, sn
    cdef double cs
    _lartg(T[j, j + 1], d - a, &cs, &sn)
    for k in range(j, n):
        x = T[j, k]
        y = T[j + 1, k]
        T[j, k] = cs * x + sn * y
        T[j + 1, k] = cs * y - sn.conjugate() * x
    for k in range(0, j + 2):
        x = T[k, j]
        y = T[k, j + 1]
        T[k, j] = cs * x + sn.conjugate() * y
        T[k, j + 1] = cs * y - sn * x
    T[j, j] = d
    T[j + 1, j + 1] = a
    T[j + 1, j] = 0
    return cs, sn


def rotate_back(cplx[::1, :] A, double[::1] cs, cplx[::1] sn, long long[::1] pos):
    """Apply ``A <- G^H A G`` for the rotations in reverse order (full rows/columns)."""
    cdef Py_ssize_t n = A.shape[0], t, k, j
    cdef double c
    cdef cplx s, x, y
    for t in range(cs.shape[0] - 1, -1, -1):
        c = cs[t]
        s = sn[t]
        j = pos[t]
        # rows: G^H = [[c, -s], [conj(s), c]]
        for k in range(n):
            x = A[j, k]
            y = A[j + 1, k]
            A[j, k] = c * x - s * y
            A[j + 1, k] = s.conjugate() * x + c * y
        # columns: A G
        for k in range(n):
            x = A[k, j]
            y = A[k, j + 1]
            A[k, j] = c * x - s.conjugate() * y
            A[k, j + 1] = s * x + c * y
