"""Choosing between the reordering-based and the recursive algorithm.

Cost models, with n_minus / n_plus the inertia and k the number of sign
inversions of the diagonal (exactly the number of swaps reordering needs):

    sylvester     c1 * n * k + c2 * n_minus * n_plus * n
    recursive-mm  c3 * n**3

Without calibration the constants are the flop counts per unit of each
term, which makes the comparison one of arithmetic only.  :func:`calibrate`
replaces them by measured seconds per unit on this machine and stores them
as JSON in ``$TRISIGN_CONFIG`` or ``~/.config/trisign/calibration.json``.
"""
from __future__ import annotations

import json
import os
import platform
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..core import as_triangular, diag_signs
from ..kernels import CMADD, ROT_PAIR, get_backend
from ..sylvester import count_sign_inversions

__all__ = [
    "CostModel",
    "DEFAULT_MODEL",
    "config_path",
    "load_model",
    "save_model",
    "calibrate",
    "estimate_costs",
    "choose_algorithm",
]


@dataclass(frozen=True)
class CostModel:
    c1: float
    c2: float
    c3: float
    source: str = "flops"


# Per swap: one rotation pair per column/row of T plus the same twice for
# carrying U back.  The Sylvester solve costs CMADD per (i, j, k) triple, of
# which there are about n_minus * n_plus * n / 2.  The recursion does three
# block products over n**3 / 6 triples.
DEFAULT_MODEL = CostModel(c1=3 * ROT_PAIR, c2=CMADD / 2, c3=3 * CMADD / 6)


def config_path() -> Path:
    env = os.environ.get("TRISIGN_CONFIG")
    if env:
        return Path(env)
    return Path.home() / ".config" / "trisign" / "calibration.json"


def load_model(path: Path | None = None) -> CostModel:
    """Stored calibration, or :data:`DEFAULT_MODEL` when none exists or it is unreadable."""
    p = Path(path) if path is not None else config_path()
    try:
        data = json.loads(p.read_text())
        return CostModel(float(data["c1"]), float(data["c2"]), float(data["c3"]), str(data.get("source", p)))
    except (OSError, ValueError, KeyError, TypeError):
        return DEFAULT_MODEL


def save_model(model: CostModel, path: Path | None = None, **extra) -> Path:
    p = Path(path) if path is not None else config_path()
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps({**asdict(model), **extra}, indent=2) + "\n")
    return p


def _best_time(fn, repeat=3):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def calibrate(n: int = 384, seed: int = 0, save: bool = True, path: Path | None = None) -> CostModel:
    """Measure the cost-model constants on this machine.

    Times recursive-mm on a balanced matrix for c3, the Sylvester path on a
    sign-sorted balanced matrix (no swaps) for c2, and the same matrix with
    positives first for c1 from the difference.
    """
    from threadpoolctl import threadpool_limits

    from ..recursive import sign_recursive_mm
    from ..sylvester import parlett_sylvester_sign
    from .generate import GenSpec, gen_triangular

    half = n // 2
    T = gen_triangular(GenSpec(n, half, seed))
    d = np.diagonal(T).copy()
    re = np.abs(d.real)
    sorted_d = np.concatenate([-re[:half], re[half:]]) + 1j * d.imag
    rev_d = np.concatenate([re[:n - half], -re[n - half:]]) + 1j * d.imag
    Ts = T.copy(order="F")
    np.fill_diagonal(Ts, sorted_d)
    Tr = T.copy(order="F")
    np.fill_diagonal(Tr, rev_d)
    k = half * (n - half)
    with threadpool_limits(1):
        t_mm = _best_time(lambda: sign_recursive_mm(T))
        t_sorted = _best_time(lambda: parlett_sylvester_sign(Ts))
        t_rev = _best_time(lambda: parlett_sylvester_sign(Tr))
    vol = half * (n - half) * n
    model = CostModel(
        c1=max(t_rev - t_sorted, 0.0) / (n * k),
        c2=t_sorted / vol,
        c3=t_mm / n**3,
        source="calibrated",
    )
    if save:
        save_model(
            model, path, n=n, backend=get_backend(), machine=platform.machine(),
            processor=platform.processor(), created=time.strftime("%Y-%m-%dT%H:%M:%S"),
        )
    return model


def estimate_costs(T, model: CostModel | None = None) -> dict[str, float]:
    """Model costs of both candidates for `T` (units of the model)."""
    model = model if model is not None else load_model()
    s = diag_signs(np.asarray(T))
    n = s.size
    n_minus = int(np.count_nonzero(s < 0))
    n_plus = n - n_minus
    k = count_sign_inversions(s)
    return {
        "sylvester": model.c1 * n * k + model.c2 * n_minus * n_plus * n,
        "recursive-mm": model.c3 * n**3,
    }


def choose_algorithm(T, model: CostModel | None = None) -> str:
    """Tag of the cheaper of ``sylvester`` and ``recursive-mm`` for `T`.

    Raises PureImaginaryEigenvalue if the sign of T is undefined.
    """
    T = as_triangular(T, copy=False)
    costs = estimate_costs(T, model)
    return "sylvester" if costs["sylvester"] < costs["recursive-mm"] else "recursive-mm"
