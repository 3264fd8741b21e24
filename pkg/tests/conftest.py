import math

import numpy as np
import pytest

from rdwlab.env import Environment, EnvPair, builtin_pair


@pytest.fixture(scope="session")
def pairs():
    return {i: builtin_pair(i) for i in (1, 2, 3, 4)}


@pytest.fixture
def square_room():
    return Environment(np.array([(-5.0, -5.0), (5.0, -5.0), (5.0, 5.0), (-5.0, 5.0)]))


@pytest.fixture
def diamond_room():
    """The square room turned 45 degrees: corners on the axes, edge midpoints on the diagonals."""
    r = math.sqrt(50.0)
    return Environment(np.array([(r, 0.0), (0.0, r), (-r, 0.0), (0.0, -r)]))


@pytest.fixture
def square_pair(square_room):
    return EnvPair(square_room, square_room, "square")


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
