import numpy as np
import pytest

from jspofdm.grid import build_grid


@pytest.fixture(scope="session")
def grid300():
    return build_grid(300, 2, "double", [(-151, -1), (1, 151)])


@pytest.fixture(scope="session")
def grid_small():
    return build_grid(52, 2, "double", [(-27, -1), (1, 27)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(results):
        terminalreporter.write_line(line)
