"""Command-line interface: ``trisign gen|sign|bench|simcache|calibrate``.

Exit status is 0 on success, 2 on invalid input (flags, files, infeasible
generator settings) and 3 when the computation itself fails (purely
imaginary or repeated eigenvalues, singular Sylvester equations).
"""
from __future__ import annotations

import argparse
import csv
import sys

from .api import ALGORITHMS, TRACEABLE, compute_sign
from .core import NumericalError, TrisignError, format_matrix, read_matrix, write_matrix
from .harness.bench import CHECK_MAX_N, bench_grid, write_csv
from .harness.cachesim import CacheConfig, cache_sim
from .harness.generate import NATURAL, GenSpec, gen_triangular
from .harness.oracle import oracle_sign, rel_diff, residuals
from .harness.select import calibrate
from .recursive import DEFAULT_BASE

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


class _Invalid(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _inertia_list(text: str) -> list:
    out = []
    for v in text.split(","):
        v = v.strip()
        if v == NATURAL:
            out.append(NATURAL)
        else:
            try:
                out.append(int(v))
            except ValueError:
                raise argparse.ArgumentTypeError(f"inertia must be an integer or 'natural', got {v!r}") from None
    return out


def _algs(text: str) -> list[str]:
    if text == "all":
        return list(ALGORITHMS)
    out = text.split(",")
    for a in out:
        if a not in ALGORITHMS and a != "auto":
            raise argparse.ArgumentTypeError(
                f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}, auto, all"
            )
    return out


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trisign", description="Sign function of upper-triangular complex matrices.")
    p.add_argument("--list-algs", action="store_true", help="print the algorithm tags and exit")
    sub = p.add_subparsers(dest="cmd")

    def matrix_source(sp, multi=False):
        if multi:
            sp.add_argument("--n", type=_int_list, help="dimension(s), comma-separated")
            sp.add_argument("--inertia", type=_inertia_list, default=[NATURAL],
                            help="negative-eigenvalue count(s) or 'natural'")
            sp.add_argument("--seed", type=_int_list, default=[0], help="seed(s), comma-separated")
        else:
            sp.add_argument("--n", type=int, help="dimension of a generated matrix")
            sp.add_argument("--inertia", type=_inertia_list, default=[NATURAL],
                            help="negative-eigenvalue count or 'natural'")
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--in", dest="inp", help="read the matrix from this file instead")

    g = sub.add_parser("gen", help="write a random triangular matrix")
    matrix_source(g)
    g.add_argument("--out", help="output path (default: stdout)")

    s = sub.add_parser("sign", help="compute the sign of a matrix")
    matrix_source(s)
    s.add_argument("--alg", default="higham", choices=list(ALGORITHMS) + ["auto"])
    s.add_argument("--base", type=int, default=DEFAULT_BASE)
    s.add_argument("--out", help="write the sign to this path")
    s.add_argument("--check", action="store_true", help=f"compare with the oracle (n <= {CHECK_MAX_N})")

    b = sub.add_parser("bench", help="time algorithms over a grid and write CSV")
    matrix_source(b, multi=True)
    b.add_argument("--alg", type=_algs, default=["higham"])
    b.add_argument("--base", type=int, default=DEFAULT_BASE)
    b.add_argument("--repeat", type=int, default=5)
    b.add_argument("--csv", help="output path (default: stdout)")
    b.add_argument("--cache-m", type=int, help="also simulate an LRU cache of this many words")
    b.add_argument("--cache-b", type=int, default=1, help="cache line size in words")
    b.add_argument("--check", action="store_true", help=f"compare with the oracle (n <= {CHECK_MAX_N})")

    c = sub.add_parser("simcache", help="replay an algorithm's accesses through an LRU cache")
    matrix_source(c)
    c.add_argument("--alg", type=_algs, default=["higham"])
    c.add_argument("--base", type=int, default=DEFAULT_BASE)
    c.add_argument("--cache-m", type=int, required=True)
    c.add_argument("--cache-b", type=int, default=1)
    c.add_argument("--csv", help="output path (default: stdout)")

    k = sub.add_parser("calibrate", help="measure the algorithm-selection cost constants")
    k.add_argument("--n", type=int, default=384)
    k.add_argument("--out", help="where to store them (default: $TRISIGN_CONFIG or ~/.config/trisign)")
    return p


def _single_inertia(args):
    if len(args.inertia) != 1:
        raise _Invalid("--inertia takes a single value here")
    return args.inertia[0]


def _load(args):
    if getattr(args, "inp", None):
        if args.n is not None:
            raise _Invalid("give either --in or --n, not both")
        return read_matrix(args.inp), None
    if args.n is None:
        raise _Invalid("need --n or --in")
    return gen_triangular(GenSpec(args.n, _single_inertia(args), args.seed)), args.seed


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def _cmd_gen(args):
    T, _ = _load(args)
    if args.out:
        write_matrix(args.out, T)
    else:
        sys.stdout.write(format_matrix(T))


def _cmd_sign(args):
    T, _ = _load(args)
    res = compute_sign(T, args.alg, base=args.base)
    inv, comm = residuals(T, res.U)
    print(f"alg={res.alg} n={T.shape[0]} flops={res.stats.flops} swaps={res.stats.swaps} "
          f"branch_eq1={res.branch_counts[0]} branch_eq2={res.branch_counts[1]} "
          f"inv_res={inv:.3e} comm_res={comm:.3e}")
    if args.check:
        if T.shape[0] > CHECK_MAX_N:
            print(f"check skipped: n > {CHECK_MAX_N}", file=sys.stderr)
        else:
            print(f"oracle_err={rel_diff(res.U, oracle_sign(T)):.3e}")
    if args.out:
        write_matrix(args.out, res.U)


def _cmd_bench(args):
    if args.n is None:
        raise _Invalid("bench needs --n")
    cache = CacheConfig(args.cache_m, args.cache_b) if args.cache_m is not None else None
    records = bench_grid(
        args.alg, args.n, args.inertia, args.seed, base=args.base, repeat=args.repeat,
        cache=cache, check=args.check, progress=sys.stderr,
    )
    out = _open_out(args.csv)
    try:
        write_csv(records, out)
    finally:
        if out is not sys.stdout:
            out.close()


def _cmd_simcache(args):
    T, _ = _load(args)
    config = CacheConfig(args.cache_m, args.cache_b)
    out = _open_out(args.csv)
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["alg", "n", "M", "B", "accesses", "misses", "writebacks", "sim_words"])
        for alg in args.alg:
            if alg not in TRACEABLE:
                print(f"skipping {alg}: no access tracing", file=sys.stderr)
                continue
            r, _ = cache_sim(alg, T, config, args.base)
            w.writerow([r.alg, r.n, r.M, r.B, r.accesses, r.misses, r.writebacks, r.sim_words])
    finally:
        if out is not sys.stdout:
            out.close()


def _cmd_calibrate(args):
    model = calibrate(n=args.n, save=True, path=args.out)
    print(f"c1={model.c1:.4g} c2={model.c2:.4g} c3={model.c3:.4g}")


_COMMANDS = {
    "gen": _cmd_gen,
    "sign": _cmd_sign,
    "bench": _cmd_bench,
    "simcache": _cmd_simcache,
    "calibrate": _cmd_calibrate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.list_algs:
        print("\n".join(ALGORITHMS))
        return EXIT_OK
    if args.cmd is None:
        parser.print_usage(sys.stderr)
        return EXIT_INVALID
    try:
        for name in ("base", "repeat"):
            v = getattr(args, name, None)
            if v is not None and v < 1:
                raise _Invalid(f"--{name} must be >= 1")
        _COMMANDS[args.cmd](args)
    except NumericalError as exc:
        print(f"trisign: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (_Invalid, TrisignError, ValueError, OSError) as exc:
        print(f"trisign: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except MemoryError:
        print("trisign: out of memory; the requested matrix is too large", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
