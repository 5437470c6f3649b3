"""Elementwise substitution algorithms.

`parlett_function` evaluates any scalar function through the commutation
relation ``F T = T F``; `parlett_higham_sign` specialises it to the sign,
using ``U^2 = I`` wherever the two diagonal signs agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import RepeatedEigenvalue, as_triangular, diag_signs
from .kernels import CostStats, Tracer, impl

__all__ = ["SignResult", "parlett_function", "parlett_sign", "parlett_higham_sign"]


@dataclass
class SignResult:
    """Computed sign with its cost counters.

    ``branch_counts`` is ``(commutation-branch elements, involution-branch
    elements)``.  ``branch_map`` is filled only on request: 1 marks an
    element from the commutation branch, 2 the involution branch.
    ``debug`` carries the report of a recursive debug run.
    """

    U: np.ndarray
    stats: CostStats = field(default_factory=CostStats)
    branch_counts: tuple[int, int] = (0, 0)
    branch_map: np.ndarray | None = None
    alg: str = ""
    debug: object = None


def _check_distinct(T: np.ndarray) -> None:
    d = np.diagonal(T)
    order = np.lexsort((d.imag, d.real))
    ds = d[order]
    same = np.flatnonzero(ds[1:] == ds[:-1])
    if same.size:
        i, j = sorted((int(order[same[0]]), int(order[same[0] + 1])))
        raise RepeatedEigenvalue(f"t[{i},{i}] == t[{j},{j}] == {complex(d[i])}")


def parlett_function(
    T,
    phi: Callable[[complex], complex],
    stats: CostStats | None = None,
    tracer: Tracer | None = None,
) -> np.ndarray:
    """Parlett's recurrence for ``F = phi(T)``, T upper triangular.

    Superdiagonals are filled column by column (j ascending, i descending)
    from ``(t_ii - t_jj) f_ij = t_ij (f_ii - f_jj) + sum_k (f_ik t_kj - t_ik f_kj)``.

    Raises
    ------
    RepeatedEigenvalue
        If two diagonal entries of T coincide.
    """
    T = as_triangular(T)
    stats = stats if stats is not None else CostStats()
    _check_distinct(T)
    n = T.shape[0]
    F = np.zeros_like(T, order="F")
    for i in range(n):
        F[i, i] = phi(complex(T[i, i]))
    if tracer is None:
        stats.flops += impl().parlett_block(T, F, 0, n)
    else:
        stats.flops += impl().parlett_block(
            T, F, 0, n, sim=tracer.cache, tb=tracer.base(T), fb=tracer.base(F)
        )
    return F


def parlett_sign(T, stats: CostStats | None = None, tracer: Tracer | None = None) -> SignResult:
    """Sign of T by the plain Parlett recurrence (every element from ``UT = TU``)."""
    T = as_triangular(T)
    stats = stats if stats is not None else CostStats()
    s = diag_signs(T)
    U = parlett_function(T, lambda z: 1.0 if z.real > 0 else -1.0, stats, tracer)
    np.fill_diagonal(U, s)
    n = T.shape[0]
    return SignResult(U, stats, (n * (n - 1) // 2, 0))


def parlett_higham_sign(
    T,
    stats: CostStats | None = None,
    *,
    record_branches: bool = False,
    tracer: Tracer | None = None,
) -> SignResult:
    """Sign of an upper-triangular matrix by the Parlett-Higham recurrence.

    For ``i < j`` the element ``u_ij`` comes from the commutation relation
    when ``u_ii + u_jj = 0`` and from ``U^2 = I`` otherwise::

        u_ij = t_ij (u_ii - u_jj)/(t_ii - t_jj) + sum_k (u_ik t_kj - t_ik u_kj)/(t_ii - t_jj)
        u_ij = -sum_k u_ik u_kj / (u_ii + u_jj)

    with k running over ``i+1 .. j-1``.  Opposite diagonal signs imply
    ``t_ii != t_jj``, so neither branch can divide by zero.

    Parameters
    ----------
    T : (n, n) array_like
        Upper-triangular complex matrix without purely imaginary diagonal
        entries.
    stats : CostStats, optional
        Counter to accumulate into; a fresh one is created otherwise.
    record_branches : bool
        Also return the per-element branch map.
    tracer : Tracer, optional
        Forward every element access to a cache simulator.

    Returns
    -------
    SignResult
    """
    T = as_triangular(T)
    stats = stats if stats is not None else CostStats()
    diag_signs(T)
    n = T.shape[0]
    U = np.zeros_like(T, order="F")
    bmap = np.zeros((n, n), dtype=np.int8) if record_branches else None
    if tracer is None:
        flops, eq1, eq2 = impl().higham_block(T, U, 0, n, bmap)
    else:
        flops, eq1, eq2 = impl().higham_block(
            T, U, 0, n, bmap, tracer.cache, tracer.base(T), tracer.base(U)
        )
    stats.flops += flops
    return SignResult(U, stats, (eq1, eq2), bmap)
