"""Random upper-triangular test matrices with prescribed inertia.

Streams come from numpy's PCG64 (``numpy.random.default_rng(seed)``), whose
output is stable across platforms and numpy versions, so a (n, k, seed)
triple always yields the same bits.  Draw order: off-diagonal real parts,
off-diagonal imaginary parts, diagonal real parts, diagonal imaginary parts,
then the negative positions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..core import GapInfeasible

__all__ = ["GenSpec", "gen_triangular", "NATURAL"]

NATURAL = "natural"


@dataclass(frozen=True)
class GenSpec:
    """Parameters of :func:`gen_triangular`.

    ``k`` is the number of diagonal entries with negative real part, or
    ``"natural"`` to keep the signs as drawn.  ``gap_floor`` defaults to
    ``1e-3 * range``.
    """

    n: int
    k: Union[int, str] = NATURAL
    seed: int = 0
    range: float = 50.0
    gap_floor: float | None = None

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if self.k != NATURAL:
            if not isinstance(self.k, (int, np.integer)) or not 0 <= self.k <= self.n:
                raise ValueError(f"k must be 'natural' or an integer in [0, {self.n}], got {self.k!r}")
        if not self.range > 0 or not math.isfinite(self.range):
            raise ValueError(f"range must be positive and finite, got {self.range!r}")
        if self.gap_floor is not None and not self.gap_floor >= 0:
            raise ValueError(f"gap_floor must be non-negative, got {self.gap_floor!r}")

    @property
    def gap(self) -> float:
        return 1e-3 * self.range if self.gap_floor is None else float(self.gap_floor)


def _max_points(R: float, g: float) -> int:
    # Points of a g-spaced grid fitting in the [-R, R]^2 box.
    if g == 0:
        return math.inf
    per_axis = math.floor(2 * R / g) + 1
    return per_axis * per_axis


def _enforce_gap(d: np.ndarray, gap: float, R: float) -> None:
    """Shift imaginary parts in place until all pairwise distances are >= gap.

    Entries are processed in index order; an entry too close to an earlier
    one moves along the imaginary axis by the smallest multiple of `gap`
    (alternating up and down, staying inside [-R, R]) that clears all
    earlier entries.  Real parts, and with them the signs, are never
    changed.
    """
    if gap == 0:
        return
    for i in range(1, d.size):
        prev = d[:i]
        if np.min(np.abs(prev - d[i])) >= gap:
            continue
        re, im = d[i].real, d[i].imag
        for m in range(1, 4 * int(2 * R / gap) + 8):
            step = (m + 1) // 2 * gap * (1 if m % 2 else -1)
            cand = im + step
            if abs(cand) > R:
                continue
            z = complex(re, cand)
            if np.min(np.abs(prev - z)) >= gap:
                d[i] = z
                break
        else:
            # The imaginary line through re is full; nudge the real part
            # outward (keeps the sign) and retry from the top.
            for m in range(1, int(2 * R / gap) + 2):
                nre = math.copysign(abs(re) + m * gap, re)
                if abs(nre) > R:
                    break
                z = complex(nre, im)
                if np.min(np.abs(prev - z)) >= gap:
                    d[i] = z
                    break
            else:
                raise GapInfeasible(f"could not place diagonal entry {i} at distance {gap} from the others")


def gen_triangular(spec: GenSpec) -> np.ndarray:
    """Draw an upper-triangular complex matrix for `spec`.

    Raises
    ------
    GapInfeasible
        If `n` points pairwise `gap` apart cannot fit in the square of
        half-width `range`.
    """
    n, R, gap = spec.n, float(spec.range), spec.gap
    if n > _max_points(R, gap):
        raise GapInfeasible(
            f"cannot place {n} eigenvalues pairwise {gap:g} apart in [-{R:g}, {R:g}]^2"
        )
    rng = np.random.default_rng(spec.seed)
    iu = np.triu_indices(n, 1)
    m = iu[0].size
    T = np.zeros((n, n), dtype=np.complex128, order="F")
    T[iu] = rng.uniform(-R, R, m) + 1j * rng.uniform(-R, R, m)
    re = rng.uniform(-R, R, n)
    im = rng.uniform(-R, R, n)
    # A zero real part has probability zero but would make the sign undefined.
    re[re == 0] = np.nextafter(0.0, 1.0)
    if spec.k != NATURAL:
        re = np.abs(re)
        neg = rng.choice(n, size=int(spec.k), replace=False)
        re[neg] = -re[neg]
    d = re + 1j * im
    _enforce_gap(d, gap, R)
    T[np.diag_indices(n)] = d
    return T
