"""Instrumented primitives shared by every algorithm.

Flop convention
---------------
Counters hold *real* flops: a complex multiply is 6, a complex add 2, so a
complex multiply-add is 8 (``CMADD``).  A real-by-complex product is 2.
Normalised operation counts divide by ``FLOPS_PER_OP = 4``, the mean cost of
one complex arithmetic operation in a multiply-add pair; in those units an
inner product of length m costs 2m operations, the usual abstract count.

Backends
--------
Hot loops live in the compiled ``trisign._core`` extension.  When it cannot
be imported, or ``TRISIGN_BACKEND=python`` is set, the pure-Python twins in
``trisign._pykernels`` are used.  Both emit identical flop counts and access
traces.
"""
from __future__ import annotations

import os
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from . import _pykernels
from .core import BlockView, EqualEigenvalues

try:
    from . import _core
except ImportError:  # pragma: no cover - exercised only without a compiler
    _core = None

__all__ = [
    "CMUL",
    "CADD",
    "CMADD",
    "FLOPS_PER_OP",
    "CostStats",
    "GivensRotation",
    "Tracer",
    "block_mul_acc",
    "swap_adjacent",
    "apply_rotation_similarity",
    "available_backends",
    "get_backend",
    "set_backend",
    "use_backend",
    "impl",
]

CMUL = 6
CADD = 2
CMADD = CMUL + CADD
RSCALE = 2
FLOPS_PER_OP = 4
# One rotated (x, y) pair: two real-by-complex, two complex-by-complex, two adds.
ROT_PAIR = 2 * RSCALE + 2 * CMUL + 2 * CADD
LARTG = 20

_BACKENDS = {"python": _pykernels}
if _core is not None:
    _BACKENDS["compiled"] = _core

_state = threading.local()


def _default_backend() -> str:
    env = os.environ.get("TRISIGN_BACKEND", "").strip().lower()
    if env:
        if env not in _BACKENDS:
            raise RuntimeError(f"TRISIGN_BACKEND={env!r} is not available; have {sorted(_BACKENDS)}")
        return env
    return "compiled" if "compiled" in _BACKENDS else "python"


_global_backend = _default_backend()


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend() -> str:
    return getattr(_state, "backend", None) or _global_backend


def set_backend(name: str) -> None:
    global _global_backend
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    _global_backend = name


@contextmanager
def use_backend(name: str):
    """Temporarily select a backend for the current thread."""
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    old = getattr(_state, "backend", None)
    _state.backend = name
    try:
        yield _BACKENDS[name]
    finally:
        _state.backend = old


def impl():
    """Kernel module of the active backend."""
    return _BACKENDS[get_backend()]


@dataclass
class CostStats:
    """Flop, swap and simulated-traffic counters for one run.

    Counters only grow.  For concurrent use give each worker its own
    instance and combine with :meth:`merge`; totals equal the serial ones.
    """

    flops: int = 0
    swaps: int = 0
    sim_words: int = 0

    def __iadd__(self, other: "CostStats") -> "CostStats":
        self.flops += other.flops
        self.swaps += other.swaps
        self.sim_words += other.sim_words
        return self

    @classmethod
    def merge(cls, *parts: "CostStats") -> "CostStats":
        total = cls()
        for p in parts:
            total += p
        return total

    def ops(self) -> float:
        """Flops in normalised operation units."""
        return self.flops / FLOPS_PER_OP


@dataclass(frozen=True)
class GivensRotation:
    """Plane rotation ``G = [[c, s], [-conj(s), c]]`` on rows/cols j, j+1."""

    c: float
    s: complex
    position: int

    def matrix(self) -> np.ndarray:
        return np.array([[self.c, self.s], [-np.conj(self.s), self.c]], dtype=np.complex128)


@dataclass
class Tracer:
    """Maps matrices to slots of a logical word address space.

    Each registered n-by-n matrix occupies ``n * n`` consecutive words in
    column-major order; every kernel access is forwarded to `cache`.
    """

    n: int
    cache: object
    _slots: dict = field(default_factory=dict)

    def base(self, A: np.ndarray) -> int:
        key = id(A)
        if key not in self._slots:
            self._slots[key] = (len(self._slots) * self.n * self.n, A)
        return self._slots[key][0]


def block_mul_acc(
    C: BlockView,
    A: BlockView,
    B: BlockView,
    alpha: complex,
    stats: CostStats,
    tracer: Tracer | None = None,
) -> None:
    """``C <- C + alpha * A @ B`` on blocks, booking ``CMADD * p * q * r`` flops.

    The scaling by `alpha` is not booked; callers pass +1 or -1.
    """
    p, q = C.shape
    pa, r = A.shape
    rb, qb = B.shape
    if pa != p or qb != q or rb != r:
        raise ValueError(f"shape mismatch: C {C.shape}, A {A.shape}, B {B.shape}")
    if C.overlaps(A) or C.overlaps(B):
        raise ValueError("output block overlaps an input block")
    stats.flops += CMADD * p * q * r
    if p == 0 or q == 0 or r == 0:
        return
    if tracer is not None:
        impl().gemm_traced(
            C.parent, tracer.base(C.parent), C.r0, C.c0,
            A.parent, tracer.base(A.parent), A.r0, A.c0,
            B.parent, tracer.base(B.parent), B.r0, B.c0,
            p, q, r, complex(alpha), tracer.cache,
        )
        return
    prod = A.array @ B.array
    if alpha == 1:
        C.array[...] += prod
    elif alpha == -1:
        C.array[...] -= prod
    else:
        C.array[...] += alpha * prod


def swap_flops(n: int) -> int:
    """Flops booked for one adjacent swap in an n-by-n triangular matrix."""
    return ROT_PAIR * (n + 2) + LARTG


def swap_adjacent(T: np.ndarray, j: int, stats: CostStats) -> GivensRotation:
    """Exchange diagonal entries j and j+1 of triangular `T` in place.

    ``T <- G T G^H`` with G from :class:`GivensRotation`.  The rotation maps
    the eigenvector direction ``(t[j, j+1], t[j+1, j+1] - t[j, j])`` onto
    the first axis; afterwards ``T[j+1, j]`` is set to zero and the two
    diagonal values are stored exactly.
    """
    n = T.shape[0]
    if not 0 <= j < n - 1:
        raise ValueError(f"swap position {j} out of range for n={n}")
    if T[j, j] == T[j + 1, j + 1]:
        raise EqualEigenvalues(f"diagonal entries {j} and {j + 1} are equal")
    c, s = impl().givens_swap(T, j)
    stats.swaps += 1
    stats.flops += swap_flops(n)
    return GivensRotation(float(c), complex(s), j)


def apply_rotation_similarity(
    A: np.ndarray,
    G: GivensRotation,
    side: str = "both",
    stats: CostStats | None = None,
    inverse: bool = False,
) -> None:
    """Apply `G` to `A` in place.

    ``side='left'`` gives ``G A``, ``'right'`` gives ``A G^H`` and ``'both'``
    the similarity ``G A G^H``.  With ``inverse=True`` G is replaced by
    ``G^H``, which undoes the corresponding forward application.
    """
    j = G.position
    n, m = A.shape
    if side not in ("left", "right", "both"):
        raise ValueError(f"side must be 'left', 'right' or 'both', got {side!r}")
    if not 0 <= j < min(n, m) - 1:
        raise ValueError(f"rotation position {j} out of range for shape {A.shape}")
    R = G.matrix()
    if inverse:
        R = R.conj().T
    if side in ("left", "both"):
        A[j:j + 2, :] = R @ A[j:j + 2, :]
        if stats is not None:
            stats.flops += ROT_PAIR * m
    if side in ("right", "both"):
        A[:, j:j + 2] = A[:, j:j + 2] @ R.conj().T
        if stats is not None:
            stats.flops += ROT_PAIR * n
