import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mosubgrad.core import Objective, Problem  # noqa: E402
from mosubgrad.problems import max_type  # noqa: E402


def abs_objective(name="abs"):
    """|x| in one dimension as max(x, -x); at the kink the first piece (+1) is returned."""
    return max_type(
        name,
        lambda x: np.array([x[0], -x[0]]),
        lambda x: np.array([[1.0], [-1.0]]),
    )


def linear_objective(g):
    g = np.asarray(g, dtype=float)
    return Objective("linear", lambda x: float(g @ x), lambda x: g.copy())


@pytest.fixture
def abs_problem():
    return Problem("ABS2", 1, (abs_objective("abs1"), abs_objective("abs2")))


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.VERDICTS:
            terminalreporter.write_line(line)
