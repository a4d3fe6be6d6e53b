import numpy as np
import pytest

from dynecga.core import Population

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def pop_of():
    def make(rows):
        return Population(np.array([[int(c) for c in r] for r in rows], dtype=np.uint8))

    return make
