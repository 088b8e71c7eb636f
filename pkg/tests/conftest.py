import sys

import numpy as np
import pytest

from se2rigidity import Se2Framework, new_graph


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fig2_triangle():
    """Agents 1 and 2 measure everyone; agent 3 measures nobody."""
    g = new_graph(3, [(0, 1), (0, 2), (1, 0), (1, 2)])
    return Se2Framework(g, [[0.0, 0.0], [1.0, 0.0], [0.4, 0.8]], [0.3, -0.5, 1.0])


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.RESULTS:
        terminalreporter.write_line(line)
