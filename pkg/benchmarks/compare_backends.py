"""Time the compiled and pure-Python kernel backends on the same inputs.

    python3 benchmarks/compare_backends.py [--n 64,128,256] [--repeat 3]

Prints one CSV row per (algorithm, n, backend) plus the speedup of the
compiled core.  Both backends are checked to return identical flop counts.
"""
import argparse
import statistics
import sys
import time
import warnings

import numpy as np
from threadpoolctl import threadpool_limits

from trisign import CostStats, compute_sign
from trisign.harness import GenSpec, gen_triangular
from trisign.kernels import available_backends, use_backend

ALGS = ("parlett", "higham", "sylvester", "recursive-mm", "recursive-ae")


def timed(T, alg, backend, repeat):
    times = []
    with use_backend(backend), threadpool_limits(1), warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(repeat):
            st = CostStats()
            t0 = time.perf_counter()
            res = compute_sign(T, alg, stats=st)
            times.append(time.perf_counter() - t0)
    return statistics.median(times), st.flops, res.U


def main(argv=None):
    p = argparse.ArgumentParser()
    p.add_argument("--n", default="64,128,256")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--alg", default=",".join(ALGS))
    args = p.parse_args(argv)
    backends = available_backends()
    if "compiled" not in backends:
        print("compiled core not built; only the python backend is available", file=sys.stderr)
    print("alg,n,backend,wall_s,flops,speedup")
    for n in (int(v) for v in args.n.split(",")):
        T = gen_triangular(GenSpec(n, n // 2, 0))
        for alg in args.alg.split(","):
            rows = {b: timed(T, alg, b, args.repeat) for b in backends}
            ref = rows.get("python")
            for b, (t, flops, U) in rows.items():
                if ref is not None and flops != ref[1]:
                    raise SystemExit(f"flop mismatch for {alg} n={n}: {b} {flops} vs python {ref[1]}")
                if ref is not None and not np.array_equal(np.isfinite(U), np.isfinite(ref[2])):
                    raise SystemExit(f"finite pattern differs for {alg} n={n}")
                speed = ref[0] / t if ref is not None else float("nan")
                print(f"{alg},{n},{b},{t:.4g},{flops},{speed:.1f}", flush=True)


if __name__ == "__main__":
    main()
