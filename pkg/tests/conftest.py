import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from tropbasis.trop_core import SymMatrix

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")

# acceptance criterion -> list of (ok, detail), printed one line per criterion
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[k]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"criterion {k}: {status}  " + "; ".join(d for _, d in parts))


UPPER = [(i, j) for i in range(5) for j in range(i, 5)]


def sym_from_upper(vals, n=5):
    M = [[Fraction(0)] * n for _ in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    for (i, j), v in zip(pairs, vals):
        M[i][j] = M[j][i] = Fraction(v)
    return SymMatrix(M)


def sym_matrices(n=5, lo=0, hi=3):
    k = n * (n + 1) // 2
    return st.lists(st.integers(lo, hi), min_size=k, max_size=k).map(lambda v: sym_from_upper(v, n))


def random_sym(rng: random.Random, lo=0, hi=3, n=5):
    return sym_from_upper([rng.randint(lo, hi) for _ in range(n * (n + 1) // 2)], n)


@pytest.fixture
def example_21():
    """The joints example with every blank set to 1."""
    return SymMatrix(
        [
            [1, 0, 1, 1, 1],
            [0, 1, 1, 1, 1],
            [1, 1, 0, 0, 0],
            [1, 1, 0, 0, 0],
            [1, 1, 0, 0, 0],
        ]
    )


@pytest.fixture
def exceptional_121():
    """Exceptional instance N1=1, N2=2, P=1 with block entries 3."""
    from tropbasis.joints import exceptional_form_matrix

    return exceptional_form_matrix(1, 2, 1, [[3, 3], [3, 3]])
