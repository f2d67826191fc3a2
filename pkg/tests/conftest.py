import math

import numpy as np
import pytest

from fuzzybox.grid import Grid, WaveFunction
from fuzzybox.windowfn import Geometry, QuantizationParams


@pytest.fixture
def box():
    return Geometry.bounded(0.0, 10.0)


@pytest.fixture
def params():
    return QuantizationParams(ell=0.1)


def gaussian(grid: Grid, center: float, width: float = 1.0, boost: float = 0.0) -> WaveFunction:
    x = grid.x
    vals = (width * math.sqrt(math.pi)) ** -0.5 * np.exp(-((x - center) ** 2) / (2 * width**2) + 1j * boost * x)
    return WaveFunction(grid, vals)


# acceptance report: one line per criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
