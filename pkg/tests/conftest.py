import random

import pytest
from hypothesis import HealthCheck, settings

from freeboundary.words import FreeGroup

settings.register_profile(
    "repo", max_examples=60, deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def F2():
    return FreeGroup(2)


@pytest.fixture
def F3():
    return FreeGroup(3)


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
