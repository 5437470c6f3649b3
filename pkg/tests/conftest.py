import numpy as np
import pytest

from trisign import available_backends, use_backend


def tri(rows):
    return np.asfortranarray(np.array(rows, dtype=np.complex128))


def random_tri(n, seed=0, diag=None, scale=1.0):
    rng = np.random.default_rng(seed)
    T = np.triu(rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))) * scale
    if diag is not None:
        np.fill_diagonal(T, diag)
    return np.asfortranarray(T)


def signed_diag(signs, seed=0):
    """Diagonal with the given real-part signs, well separated."""
    rng = np.random.default_rng(seed)
    signs = np.asarray(signs, dtype=float)
    mag = 1.0 + np.arange(signs.size) * 0.37 + rng.uniform(0, 0.1, signs.size)
    return signs * mag + 1j * rng.uniform(-1, 1, signs.size)


@pytest.fixture(params=available_backends())
def backend(request):
    with use_backend(request.param):
        yield request.param


# Acceptance bookkeeping: one summary line per criterion, printed at the end
# of the run so it lands in the captured test output.
ACCEPTANCE: dict[int, list] = {}


def record(criterion: int, clause: str, ok: bool, detail: str) -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((clause, bool(ok), detail))
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[c]
        status = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        detail = "; ".join(f"{clause}: {'ok' if ok else 'FAILED'} ({d})" for clause, ok, d in parts)
        tr.write_line(f"criterion {c:2d}: {status} | {detail}")
