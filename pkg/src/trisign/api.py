"""Tag-based dispatch over the five sign algorithms."""
from __future__ import annotations

from .classic import SignResult, parlett_higham_sign, parlett_sign
from .kernels import CostStats, Tracer
from .recursive import DEFAULT_BASE, sign_recursive_ae, sign_recursive_mm
from .sylvester import parlett_sylvester_sign

__all__ = ["ALGORITHMS", "TRACEABLE", "compute_sign"]

ALGORITHMS = ("parlett", "higham", "sylvester", "recursive-mm", "recursive-ae")
# Algorithms whose kernels can forward element accesses to a cache simulator.
TRACEABLE = ("parlett", "higham", "recursive-mm", "recursive-ae")


def compute_sign(
    T,
    alg: str = "higham",
    *,
    base: int = DEFAULT_BASE,
    stats: CostStats | None = None,
    tracer: Tracer | None = None,
) -> SignResult:
    """Sign of upper-triangular `T` by the algorithm named `alg`.

    ``alg="auto"`` picks between ``sylvester`` and ``recursive-mm`` with
    :func:`trisign.harness.select.choose_algorithm`; the chosen tag is stored
    on the result as ``result.alg``.  `base` only affects the recursive
    algorithms.
    """
    if alg == "auto":
        from .harness.select import choose_algorithm

        alg = choose_algorithm(T)
    if alg not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {alg!r}; choose from {', '.join(ALGORITHMS)} or auto")
    if tracer is not None and alg not in TRACEABLE:
        raise ValueError(f"algorithm {alg!r} has no access tracing")
    if alg == "parlett":
        res = parlett_sign(T, stats, tracer=tracer)
    elif alg == "higham":
        res = parlett_higham_sign(T, stats, tracer=tracer)
    elif alg == "sylvester":
        res = parlett_sylvester_sign(T, stats)
    elif alg == "recursive-mm":
        res = sign_recursive_mm(T, base, stats, tracer=tracer)
    else:
        res = sign_recursive_ae(T, base, stats, tracer=tracer)
    res.alg = alg
    return res
