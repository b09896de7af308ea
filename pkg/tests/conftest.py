import numpy as np
import pytest

from fkdet.algebra import TracialPair


@pytest.fixture
def pair():
    return TracialPair([3, 2, 2], [0, 1], {0: 1.0, 1: 0.5})


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
