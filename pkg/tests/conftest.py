import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from credalfusion import IntervalDistribution, LikelihoodMatrix, MassFunction, PointDistribution

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def machine_point():
    prior = PointDistribution([0.9, 0.1])
    lik = np.array([[0.1, 0.6], [0.3, 0.6], [0.7, 0.2]])
    return prior, lik


@pytest.fixture
def sensor_points():
    return [PointDistribution([0.45, 0.55]), PointDistribution([0.6, 0.4]), PointDistribution([0.1, 0.9])]


@pytest.fixture
def machine_interval():
    prior = IntervalDistribution([0.85, 0.05], [0.95, 0.15])
    lik = LikelihoodMatrix(
        [[0.05, 0.55], [0.25, 0.55], [0.65, 0.15]],
        [[0.15, 0.65], [0.35, 0.65], [0.75, 0.25]],
    )
    return prior, lik


@pytest.fixture
def sensor_intervals():
    return [
        IntervalDistribution([0.40, 0.50], [0.50, 0.60]),
        IntervalDistribution([0.55, 0.35], [0.65, 0.45]),
        IntervalDistribution([0.05, 0.85], [0.15, 0.95]),
    ]


@pytest.fixture
def machine_ds(machine_interval):
    prior = MassFunction.from_subsets({(1,): 0.85, (2,): 0.05, (1, 2): 0.1}, 2)
    return prior, machine_interval[1]


@pytest.fixture
def sensor_masses():
    return [
        MassFunction.from_subsets({(1,): 0.40, (2,): 0.50, (1, 2): 0.10}, 2),
        MassFunction.from_subsets({(1,): 0.55, (2,): 0.35, (1, 2): 0.10}, 2),
        MassFunction.from_subsets({(1,): 0.05, (2,): 0.85, (1, 2): 0.10}, 2),
    ]


@pytest.fixture
def ignorant_pair():
    m = MassFunction.from_subsets({(1,): 0.1, (2,): 0.1, (1, 2): 0.8}, 2)
    return [m, m]


# acceptance criteria report one line each in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    @contextmanager
    def check(number, title):
        start = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            line = f"criterion {number:>2}: FAIL  {title} ({type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
            ACCEPTANCE_LINES.append(line)
            print(line)
            raise
        line = f"criterion {number:>2}: PASS  {title} ({time.perf_counter() - start:.2f} s)"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
