import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from jchcontrol.hilbert import enumerate_basis
from jchcontrol.operators import ModelParams

settings.register_profile("ci", max_examples=30, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("dev", max_examples=10, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def space_2_3():
    return enumerate_basis(2, 3)


@pytest.fixture(scope="session")
def space_2_4():
    return enumerate_basis(2, 4)


@pytest.fixture
def unit_params_2():
    return ModelParams.uniform(2, 1.0, [(1, 2)])


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
