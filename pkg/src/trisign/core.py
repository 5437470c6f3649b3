"""Triangular-matrix conventions, nested partitions and inertia.

Conventions used throughout the package
---------------------------------------
* A *triangular matrix* is a square ``complex128`` ndarray in Fortran
  (column-major) order whose strictly lower part is zero.  Storage is dense,
  not packed.
* Indices are 0-based.  A nested partition level is a tuple of 0-based range
  start indices and the one-past-the-end sentinel is ``n``.  In 1-based
  notation start ``s`` corresponds to ``s + 1`` and the sentinel to ``n + 1``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "TrisignError",
    "NumericalError",
    "PureImaginaryEigenvalue",
    "RepeatedEigenvalue",
    "EqualEigenvalues",
    "SingularSylvester",
    "GapInfeasible",
    "IllConditionedWarning",
    "as_triangular",
    "scalar_sign",
    "diag_signs",
    "BlockView",
    "Inertia",
    "inertia_of",
    "NestedPartition",
    "make_partition",
    "split_point",
    "eta",
    "pi",
    "range_sum",
    "coarse_range_sum",
    "format_matrix",
    "write_matrix",
    "read_matrix",
]

# Relative threshold for the "almost imaginary" / "almost equal" diagnostics.
ILL_CONDITIONED_RTOL = 1e-12


class TrisignError(Exception):
    """Base class for all errors raised by this package."""


class NumericalError(TrisignError):
    """The requested function is undefined or the method breaks down."""


class PureImaginaryEigenvalue(NumericalError):
    """A diagonal entry has zero real part; the sign function is undefined."""


class RepeatedEigenvalue(NumericalError):
    """Two diagonal entries coincide and the Parlett recurrence breaks down."""


class EqualEigenvalues(NumericalError):
    """Adjacent diagonal entries are equal, so they cannot be swapped."""


class SingularSylvester(NumericalError):
    """A Sylvester equation has coefficient blocks with a shared eigenvalue."""


class GapInfeasible(TrisignError, ValueError):
    """The requested eigenvalue separation cannot be realised."""


class IllConditionedWarning(UserWarning):
    """Emitted when a problem is close to being undefined or singular."""


def as_triangular(T, *, copy: bool = True, name: str = "T") -> np.ndarray:
    """Validate `T` and return it as a Fortran-ordered complex128 array.

    Raises
    ------
    ValueError
        If `T` is not square, has non-finite entries, or has a nonzero
        strictly lower part.
    """
    A = np.array(T, dtype=np.complex128, order="F", copy=True if copy else None)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError(f"{name} has non-finite entries")
    if np.any(np.tril(A, -1) != 0):
        raise ValueError(f"{name} is not upper triangular")
    return A


def scalar_sign(z: complex) -> float:
    """Sign of the real part of `z` (``+1.0`` or ``-1.0``)."""
    x = z.real
    if x > 0:
        return 1.0
    if x < 0:
        return -1.0
    raise PureImaginaryEigenvalue(f"sign is undefined for purely imaginary {z!r}")


def diag_signs(T: np.ndarray) -> np.ndarray:
    """Signs of the real parts of the diagonal of `T` as a float array.

    Raises PureImaginaryEigenvalue on a zero real part and warns with
    IllConditionedWarning when a real part is tiny relative to the diagonal.
    """
    d = np.diagonal(T)
    re = d.real
    zero = np.flatnonzero(re == 0)
    if zero.size:
        i = int(zero[0])
        raise PureImaginaryEigenvalue(
            f"diagonal entry {i} = {complex(d[i])} has zero real part; sign is undefined"
        )
    scale = float(np.abs(d).max())
    if np.any(np.abs(re) < ILL_CONDITIONED_RTOL * scale):
        warnings.warn(
            "diagonal has entries with almost-zero real part; the sign is ill-conditioned",
            IllConditionedWarning,
            stacklevel=3,
        )
    return np.where(re > 0, 1.0, -1.0)


@dataclass(frozen=True)
class BlockView:
    """Half-open rectangular block ``parent[r0:r1, c0:c1]`` of a matrix."""

    parent: np.ndarray
    r0: int
    r1: int
    c0: int
    c1: int

    def __post_init__(self):
        m, n = self.parent.shape
        if not (0 <= self.r0 <= self.r1 <= m and 0 <= self.c0 <= self.c1 <= n):
            raise ValueError(
                f"block [{self.r0}:{self.r1}, {self.c0}:{self.c1}] out of bounds for {self.parent.shape}"
            )

    @property
    def array(self) -> np.ndarray:
        return self.parent[self.r0:self.r1, self.c0:self.c1]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.r1 - self.r0, self.c1 - self.c0)

    def overlaps(self, other: "BlockView") -> bool:
        if other.parent is not self.parent:
            return False
        return (
            self.r0 < other.r1 and other.r0 < self.r1 and self.c0 < other.c1 and other.c0 < self.c1
        )


@dataclass(frozen=True)
class Inertia:
    n_minus: int
    n_plus: int

    @property
    def n(self) -> int:
        return self.n_minus + self.n_plus


def inertia_of(T) -> Inertia:
    """Count diagonal entries with negative and positive real parts."""
    s = diag_signs(np.asarray(T))
    n_minus = int(np.count_nonzero(s < 0))
    return Inertia(n_minus, s.size - n_minus)


# --------------------------------------------------------------------------
# Nested partitions


def split_point(lo: int, hi: int) -> int:
    """Start of the second half when ``[lo, hi)`` is halved."""
    return lo + (hi - lo + 1) // 2


@dataclass(frozen=True)
class NestedPartition:
    """Level-indexed family of range start indices.

    ``levels[l]`` holds the (0-based, strictly increasing) starts of the
    ranges at level ``l``; ``levels[0] == (0,)``.  The successor of the last
    start is the sentinel ``n``.
    """

    levels: tuple[tuple[int, ...], ...]
    n: int
    base: int

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def eta(self, level: int, i: int) -> int:
        starts = self.levels[level]
        pos = _position(starts, i, level)
        return starts[pos + 1] if pos + 1 < len(starts) else self.n

    def pi(self, level: int, i: int) -> int:
        starts = self.levels[level]
        if i == self.n:
            return starts[-1]
        pos = _position(starts, i, level)
        if pos == 0:
            raise ValueError(f"{i} is the first start of level {level}; it has no predecessor")
        return starts[pos - 1]

    def ranges(self, level: int) -> list[tuple[int, int]]:
        starts = self.levels[level]
        ends = starts[1:] + (self.n,)
        return list(zip(starts, ends))

    def is_nested(self) -> bool:
        """True when every level is the odd-position refinement of the next."""
        return all(
            self.levels[l - 1] == self.levels[l][::2] for l in range(1, len(self.levels))
        )


def _position(starts: tuple[int, ...], i: int, level: int) -> int:
    pos = _bisect(starts, i)
    if pos < 0:
        raise ValueError(f"{i} is not a range start at level {level}")
    return pos


def _bisect(starts, i):
    lo, hi = 0, len(starts)
    while lo < hi:
        mid = (lo + hi) // 2
        if starts[mid] < i:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo < len(starts) and starts[lo] == i else -1


def make_partition(n: int, base: int) -> NestedPartition:
    """Nested partition of ``range(n)`` by recursive halving.

    Each range larger than `base` is split at ``split_point``; ranges of size
    at most `base` are leaves and are carried unchanged into deeper levels.
    The same rule drives the recursive sign algorithms, so their recursion
    tree is exactly this partition.
    """
    if n < 1 or base < 1:
        raise ValueError(f"need n >= 1 and base >= 1, got n={n}, base={base}")
    levels = [(0,)]
    while True:
        cur = levels[-1]
        nxt = []
        split = False
        for lo, hi in zip(cur, cur[1:] + (n,)):
            nxt.append(lo)
            if hi - lo > base:
                nxt.append(split_point(lo, hi))
                split = True
        if not split:
            break
        levels.append(tuple(nxt))
    return NestedPartition(tuple(levels), n, base)


def eta(P: NestedPartition, level: int, i: int) -> int:
    """Start of the range following start `i` at `level`, or the sentinel ``n``."""
    return P.eta(level, i)


def pi(P: NestedPartition, level: int, i: int) -> int:
    """Start of the range preceding `i` (a start or the sentinel) at `level`."""
    return P.pi(level, i)


def range_sum(v, P: NestedPartition, level: int, s: int, e: int):
    """Sum of ``v[s:e]`` taken range by range over level `level`.

    `s` must be a start at `level` and `e` a start or the sentinel.
    """
    total = 0
    while s < e:
        nxt = P.eta(level, s)
        total = total + sum(v[s:nxt])
        s = nxt
    return total


def coarse_range_sum(v, P: NestedPartition, level: int, s: int, e: int):
    """Same sum as :func:`range_sum`, regrouped over the coarser level.

    The level-`level` sum from `s` to `e` equals the level ``level - 1`` sum
    between the nearest coarse starts, plus the single fine range at `s`
    when `s` is not a coarse start, plus the fine range just before `e` when
    `e` is not a coarse start (the four parity cases).  Requires
    ``P.is_nested()`` for the regrouping to be valid.
    """
    if level == 0 or s >= e:
        return range_sum(v, P, level, s, e)
    coarse = set(P.levels[level - 1]) | {P.n}
    head = 0
    tail = 0
    if s not in coarse:
        nxt = P.eta(level, s)
        head = sum(v[s:nxt])
        s = nxt
    if e not in coarse:
        prev = P.pi(level, e)
        tail = sum(v[prev:e])
        e = prev
    return head + range_sum(v, P, level - 1, s, e) + tail


# --------------------------------------------------------------------------
# Matrix file format

_HEADER = "trisign v1"


def format_matrix(T) -> str:
    """Upper triangle of `T` in the ``trisign v1`` text format.

    Header ``trisign v1 <n>`` followed by one ``<i> <j> <re> <im>`` line per
    upper-triangular entry in row-major order, 0-based indices, 17
    significant digits.
    """
    A = np.asarray(T)
    n = A.shape[0]
    lines = [f"{_HEADER} {n}"]
    for i in range(n):
        for j in range(i, n):
            z = A[i, j]
            lines.append(f"{i} {j} {z.real:.17g} {z.imag:.17g}")
    return "\n".join(lines) + "\n"


def write_matrix(path, T) -> None:
    """Write `T` to `path` in the format of :func:`format_matrix`."""
    Path(path).write_text(format_matrix(T))


def read_matrix(path) -> np.ndarray:
    """Read a ``trisign v1`` file; absent entries are zero."""
    p = Path(path)
    with p.open() as fh:
        header = fh.readline().split()
        if len(header) != 3 or " ".join(header[:2]) != _HEADER:
            raise ValueError(f"{p}: bad header {' '.join(header)!r}")
        n = int(header[2])
        if n < 1:
            raise ValueError(f"{p}: dimension must be positive, got {n}")
        A = np.zeros((n, n), dtype=np.complex128, order="F")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"{p}:{lineno}: expected '<i> <j> <re> <im>'")
            i, j = int(parts[0]), int(parts[1])
            if not (0 <= i <= j < n):
                raise ValueError(f"{p}:{lineno}: entry ({i}, {j}) is outside the upper triangle")
            A[i, j] = complex(float(parts[2]), float(parts[3]))
    return as_triangular(A, copy=False, name=str(p))
