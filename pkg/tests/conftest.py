import pytest
from hypothesis import strategies as st

from permsim.core import Permutation


@st.composite
def permutations_st(draw, min_n=1, max_n=12):
    n = draw(st.integers(min_n, max_n))
    return Permutation(tuple(draw(st.permutations(range(1, n + 1)))))


def random_perm(rng, n: int) -> Permutation:
    # rng: random.Random or numpy Generator
    vals = list(range(1, n + 1))
    rng.shuffle(vals)
    return Permutation(tuple(vals))


@pytest.fixture
def example_pair():
    return Permutation((1, 4, 3, 5, 2)), Permutation((2, 5, 3, 1, 4))


_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def acceptance():
    """Record one verdict line per acceptance criterion, printed at session end."""
    def record(criterion: str, ok: bool, detail: str) -> None:
        _ACCEPTANCE.append((criterion, ok, detail))
        print(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(_ACCEPTANCE, key=lambda r: int(r[0].split()[0].rstrip("ab"))):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}")
