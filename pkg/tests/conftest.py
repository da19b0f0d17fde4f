import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from scforge.protograph import CodeParams, PartitionMatrix

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# lines collected by tests/test_acceptance.py and echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_partition(rng, gamma, kappa, m) -> PartitionMatrix:
    return PartitionMatrix(rng.integers(0, m + 1, (gamma, kappa)), m)


@pytest.fixture
def g3k7_params():
    return CodeParams(3, 7, 13, 1, 10)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
