"""Test-matrix generation, reference oracle, cache simulation, algorithm
selection and benchmarking."""
from .bench import CSV_COLUMNS, BenchRecord, bench_grid, run_one, write_csv
from .cachesim import CacheConfig, CacheReport, cache_sim, make_cache
from .generate import NATURAL, GenSpec, gen_triangular
from .oracle import oracle_sign, rel_diff, residuals
from .select import CostModel, calibrate, choose_algorithm, estimate_costs, load_model

__all__ = [
    "CSV_COLUMNS",
    "BenchRecord",
    "bench_grid",
    "run_one",
    "write_csv",
    "CacheConfig",
    "CacheReport",
    "cache_sim",
    "make_cache",
    "NATURAL",
    "GenSpec",
    "gen_triangular",
    "oracle_sign",
    "rel_diff",
    "residuals",
    "CostModel",
    "calibrate",
    "choose_algorithm",
    "estimate_costs",
    "load_model",
]
