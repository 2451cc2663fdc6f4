import numpy as np
import pytest

from klr_hopfield.kernel import KernelParams, PatternSet
from klr_hopfield.training import train_network

CRITERIA: list[str] = []


@pytest.fixture(scope="session")
def default_net():
    """N=50, P=150, gamma=0.1 network at the default training settings."""
    ps = PatternSet.random(50, 150, np.random.default_rng(1234))
    return train_network(ps, KernelParams(0.1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)
