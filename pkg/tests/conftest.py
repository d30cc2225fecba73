import numpy as np
import pytest

from gsqg_vortex.geometry import CellGrid

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def flat_grid(pts, measure=1.0):
    """Equal-measure cell grid on arbitrary points (identity mirror, one group)."""
    pts = np.asarray(pts, dtype=float)
    n = len(pts)
    return CellGrid(pts[:, 0], pts[:, 1], np.full(n, measure), np.arange(n), [np.arange(n)], np.sqrt(measure))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
