import os

import pytest
from hypothesis import HealthCheck, settings

from aerial_na.availability import TailEstimator
from aerial_na.scenario import Scenario

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def scenario():
    return Scenario()


@pytest.fixture
def analytic(scenario):
    return TailEstimator(scenario.fading, method="analytic", L=scenario.faps)
