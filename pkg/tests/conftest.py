import numpy as np
import pytest

from r0fde.tick import TickParams

BASE_TICK = TickParams(1.0, (0.8, 0.6, 0.5, 0.9), (0.1, 0.15, 0.05, 0.2), 1.0, 2.0, 2.0, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tick():
    return BASE_TICK


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
