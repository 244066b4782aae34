import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from urnspread.graph import Graph, cycle_graph  # noqa: E402
from urnspread.simulate import Trace  # noqa: E402


@pytest.fixture
def two_cycle():
    """Edges e1: 1->2 with x=1 and e2: 2->1 with x=0."""
    return cycle_graph(2, np.array([[1.0], [0.0]]))


@pytest.fixture
def two_cycle_trace():
    """Seed 1, then (1,2) and (2,1): the hand-computed likelihood fixture."""
    return Trace(0, [0, 1])


@pytest.fixture
def loop_triangle():
    """3-cycle with a self-loop at every vertex, generic covariates."""
    X = np.array([[0.3, -0.2], [-0.1, 0.4], [0.2, 0.1],
                  [0.5, 0.0], [-0.4, 0.2], [0.0, -0.3]])
    return Graph(3, [0, 1, 2, 0, 1, 2], [1, 2, 0, 0, 1, 2], X)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
