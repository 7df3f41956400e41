import pytest

from rudinshapiro.diffmat import construct
from rudinshapiro.fixtures import fixture
from rudinshapiro.sequence import FactorGenerator

_CRITERIA: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record an acceptance line: ``criterion(label, ok, detail)`` then assert."""

    def record(label, ok, detail=""):
        _CRITERIA.append((label, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'} {label} {detail}")
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")


@pytest.fixture(scope="session")
def matrix1():
    return fixture("matrix1")


@pytest.fixture(scope="session")
def m1gen(matrix1):
    return FactorGenerator(matrix1)


@pytest.fixture(scope="session")
def gen_by_q():
    """Single-factor generators keyed by alphabet size."""
    return {
        2: FactorGenerator(construct(2, 1)),
        3: FactorGenerator(construct(3, 1)),
        4: FactorGenerator(fixture("matrix1")),
        8: FactorGenerator(construct(2, 3)),
        9: FactorGenerator(construct(3, 2)),
    }
