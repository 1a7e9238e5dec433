import numpy as np
import pytest

CRITERIA = []


@pytest.fixture
def fixture8():
    """Frozen 8x8 PSD matrix used by the sparsity-response checks."""
    A = np.random.default_rng(8).standard_normal((8, 8))
    return A.T @ A / 8


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)
