"""Trace-driven ideal-cache simulation of the sign algorithms.

Each matrix an algorithm touches (T, U and the accumulators) gets its own
``n * n`` block of logical word addresses, column-major, one complex entry
per word.  Every element read and write the kernels perform is replayed
through a fully associative LRU cache.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..api import TRACEABLE, compute_sign
from ..classic import SignResult
from ..core import as_triangular
from ..kernels import CostStats, Tracer, impl
from ..recursive import DEFAULT_BASE

__all__ = ["CacheConfig", "CacheReport", "make_cache", "cache_sim"]


@dataclass(frozen=True)
class CacheConfig:
    """Cache of `M` words in lines of `B` words, fully associative LRU."""

    M: int
    B: int = 1
    policy: str = "lru"

    def __post_init__(self):
        if self.policy != "lru":
            raise ValueError(f"only the 'lru' policy is simulated, got {self.policy!r}")
        if not (isinstance(self.B, int) and isinstance(self.M, int)) or not self.M >= self.B >= 1:
            raise ValueError(f"need integers M >= B >= 1, got M={self.M!r}, B={self.B!r}")


@dataclass(frozen=True)
class CacheReport:
    """Counters of one simulated run.

    ``sim_words = misses * B`` counts words loaded into the cache.  Dirty
    evictions are reported separately in ``writebacks`` (lines), since
    they depend on when the run is considered finished.
    """

    alg: str
    n: int
    M: int
    B: int
    accesses: int
    misses: int
    writebacks: int

    @property
    def sim_words(self) -> int:
        return self.misses * self.B


def make_cache(config: CacheConfig):
    """LRU simulator of the active kernel backend."""
    return impl().LRUCache(config.M, config.B)


def cache_sim(
    alg: str,
    T,
    config: CacheConfig,
    base: int = DEFAULT_BASE,
    stats: CostStats | None = None,
) -> tuple[CacheReport, SignResult]:
    """Run `alg` on `T` with access tracing.

    The returned result's ``stats.sim_words`` is set to the simulated traffic.
    """
    if alg not in TRACEABLE:
        raise ValueError(f"cache simulation supports {', '.join(TRACEABLE)}; got {alg!r}")
    T = as_triangular(T)
    cache = make_cache(config)
    tracer = Tracer(T.shape[0], cache)
    stats = stats if stats is not None else CostStats()
    res = compute_sign(T, alg, base=base, stats=stats, tracer=tracer)
    report = CacheReport(alg, T.shape[0], config.M, config.B, cache.accesses, cache.misses, cache.writebacks)
    stats.sim_words += report.sim_words
    return report, res
