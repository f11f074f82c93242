import numpy as np
import pytest

from jcsim.hilbert import RateSet

G_PAPER = 2 * np.pi * 3.45


@pytest.fixture
def paper_rates():
    """g/kappa = 5.3, g/gamma = 14 at g/2pi = 3.45 GHz."""
    return RateSet.from_ratios(G_PAPER, 5.3, 14.0)


@pytest.fixture
def unit_rates():
    return RateSet(1.0, 0.2, 0.05)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
