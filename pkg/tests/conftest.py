import pytest

from loopkit.constructions import small_loop_corpus
from loopkit.core import has_two_sided_inverses

ACCEPTANCE_LINES: list[str] = []

RIGHT_BOL = (("right-bol", None, True),)


def sigma_names(L) -> list[str]:
    """The self-map families swept over every corpus loop."""
    names = ["identity", "square"] + [f"const:{c}" for c in range(L.order)]
    if has_two_sided_inverses(L):
        names += ["inv"] + [f"rdivinv:{g}" for g in range(L.order)]
    return names


@pytest.fixture(scope="session")
def small_corpus():
    """Every loop of order 1..6 up to isomorphism."""
    return [L for n in range(1, 7) for L in small_loop_corpus(n)]


@pytest.fixture(scope="session")
def bol8():
    """The right Bol loops of order 8 up to isomorphism."""
    return list(small_loop_corpus(8, RIGHT_BOL))


@pytest.fixture(scope="session")
def corpus(small_corpus, bol8):
    return small_corpus + bol8


@pytest.fixture
def acceptance():
    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
