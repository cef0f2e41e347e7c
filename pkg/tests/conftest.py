import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from obfb.banks import mclt
from obfb.filterbank import to_polyphase

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=15, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def mclt_sine():
    return mclt(8, 3, 7 / 4, "sine")


@pytest.fixture(scope="session")
def mclt_kaiser():
    return mclt(8, 3, 7 / 4, "kaiser")


@pytest.fixture(scope="session")
def pp_sine(mclt_sine):
    return to_polyphase(mclt_sine)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(mod.format_line(*line))
