from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from vqcverify.models import two_qubit_example

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CENTER = {"x0": 6.0, "x1": 2.7}


@pytest.fixture
def two_qubit():
    return two_qubit_example()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
