import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bsplan.scenario import StationSet

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")

# filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k.split()[0])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


def random_stations(rng: np.random.Generator, n: int, size: float = 10.0, alpha: float = 4.0):
    return StationSet(rng.uniform(0.0, size, (n, 2)), alpha)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
