import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kloosterman.finite_field import make_field

_ACCEPTANCE = []


@pytest.fixture
def acceptance_line():
    """Record one PASS/FAIL line per criterion; printed in the terminal summary."""

    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def F2():
    return make_field(2)


@pytest.fixture(scope="session")
def F3():
    return make_field(3)


@pytest.fixture(scope="session")
def F5():
    return make_field(5)


@pytest.fixture(scope="session")
def F9():
    return make_field(3, 2)
