"""Sign function of upper-triangular complex matrices.

Five algorithms share one set of instrumented kernels:

========== ==============================================================
parlett    elementwise commutation recurrence, any scalar function
higham     commutation or involution relation chosen per element
sylvester  sort eigenvalues by sign, then one triangular Sylvester solve
recursive-mm  cache-efficient recursion, block-multiply accumulators
recursive-ae  same recursion, single accumulator, about half the flops
========== ==============================================================

``compute_sign(T, alg)`` dispatches by tag; every result carries a
:class:`CostStats` with flop, swap and simulated-traffic counters.
"""
from .api import ALGORITHMS, TRACEABLE, compute_sign
from .classic import SignResult, parlett_function, parlett_higham_sign, parlett_sign
from .core import (
    BlockView,
    EqualEigenvalues,
    GapInfeasible,
    IllConditionedWarning,
    Inertia,
    NestedPartition,
    NumericalError,
    PureImaginaryEigenvalue,
    RepeatedEigenvalue,
    SingularSylvester,
    TrisignError,
    as_triangular,
    inertia_of,
    make_partition,
    read_matrix,
    write_matrix,
)
from .kernels import (
    FLOPS_PER_OP,
    CostStats,
    GivensRotation,
    apply_rotation_similarity,
    available_backends,
    block_mul_acc,
    get_backend,
    set_backend,
    swap_adjacent,
    use_backend,
)
from .recursive import DEFAULT_BASE, sign_recursive_ae, sign_recursive_mm
from .sylvester import (
    block_parlett_sylvester,
    count_sign_inversions,
    parlett_sylvester_sign,
    reorder_by_sign,
    solve_tri_sylvester,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "TRACEABLE",
    "compute_sign",
    "SignResult",
    "parlett_function",
    "parlett_sign",
    "parlett_higham_sign",
    "parlett_sylvester_sign",
    "sign_recursive_mm",
    "sign_recursive_ae",
    "DEFAULT_BASE",
    "reorder_by_sign",
    "count_sign_inversions",
    "solve_tri_sylvester",
    "block_parlett_sylvester",
    "BlockView",
    "Inertia",
    "NestedPartition",
    "as_triangular",
    "inertia_of",
    "make_partition",
    "read_matrix",
    "write_matrix",
    "FLOPS_PER_OP",
    "CostStats",
    "GivensRotation",
    "apply_rotation_similarity",
    "block_mul_acc",
    "swap_adjacent",
    "available_backends",
    "get_backend",
    "set_backend",
    "use_backend",
    "TrisignError",
    "NumericalError",
    "PureImaginaryEigenvalue",
    "RepeatedEigenvalue",
    "EqualEigenvalues",
    "SingularSylvester",
    "GapInfeasible",
    "IllConditionedWarning",
]
