import pytest

from rwrs import make_step_law
from rwrs.steplaw import _plus_one_law

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def law():
    return make_step_law(0.5)


@pytest.fixture(scope="session")
def plus_one():
    return _plus_one_law()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
