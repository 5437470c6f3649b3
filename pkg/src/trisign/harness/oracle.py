"""Reference sign via explicit eigenvectors, plus residual diagnostics.

The oracle uses SciPy's triangular solver and shares no code with the
package's algorithms.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from ..core import RepeatedEigenvalue, as_triangular, diag_signs

__all__ = ["oracle_sign", "residuals", "rel_diff"]

# Norms above this are rescaled before forming products.
_SAFE = 1e150


def oracle_sign(T) -> np.ndarray:
    """``V diag(sign(Re t_jj)) V^-1`` with V the unit upper-triangular eigenvectors.

    Column j of V solves ``(T - t_jj I) v = 0`` with ``v_j = 1`` and
    ``v_i = 0`` for ``i > j``.
    """
    T = as_triangular(T)
    n = T.shape[0]
    d = np.diagonal(T).copy()
    if np.unique(d).size != n:
        raise RepeatedEigenvalue("oracle needs distinct diagonal entries")
    s = diag_signs(T)
    V = np.eye(n, dtype=np.complex128)
    for j in range(1, n):
        A = T[:j, :j] - d[j] * np.eye(j)
        V[:j, j] = solve_triangular(A, -T[:j, j], lower=False, check_finite=False)
    Vinv = solve_triangular(V, np.eye(n, dtype=np.complex128), lower=False, unit_diagonal=True)
    return np.asfortranarray(np.triu((V * s) @ Vinv))


def residuals(T, U) -> tuple[float, float]:
    """Normalised involution and commutation residuals of a computed sign.

    ``inv_res = ||U^2 - I||_F / max(1, ||U||_F^2)`` and
    ``comm_res = ||UT - TU||_F / max(1, ||U||_F ||T||_F)``.

    When ``||U||_F`` or ``||T||_F`` is so large that the products could
    overflow, both are evaluated on copies scaled to unit norm, so they stay
    finite whenever U is.
    """
    T = np.asarray(T)
    U = np.asarray(U)
    if T.shape != U.shape or T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValueError(f"shape mismatch: T {T.shape}, U {U.shape}")
    n = U.shape[0]
    nu = float(np.linalg.norm(U))
    nt = float(np.linalg.norm(T))
    if nu < _SAFE and nt < _SAFE:
        inv = np.linalg.norm(U @ U - np.eye(n)) / max(1.0, nu * nu)
        comm = np.linalg.norm(U @ T - T @ U) / max(1.0, nu * nt)
        return float(inv), float(comm)
    u = U / nu
    t = T / nt
    # ||U^2 - I|| / ||U||^2 = ||u^2 - I / ||U||^2||, and ||U|| > 1 here.
    inv = np.linalg.norm(u @ u - np.eye(n) / nu / nu)
    comm = np.linalg.norm(u @ t - t @ u)
    log_prod = np.log(nu) + np.log(nt)
    if log_prod < 0:
        comm *= np.exp(log_prod)
    return float(inv), float(comm)


def rel_diff(A, B) -> float:
    """``||A - B||_F / max(||B||_F, tiny)``."""
    nb = np.linalg.norm(B)
    return float(np.linalg.norm(np.asarray(A) - np.asarray(B)) / max(nb, np.finfo(float).tiny))
