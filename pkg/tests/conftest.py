import os

import pytest
from hypothesis import HealthCheck, settings

from etb.budget import set_budget
from etb.ring import ring_make

settings.register_profile("fast", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "fast"))


@pytest.fixture(autouse=True)
def _fresh_budget():
    set_budget(None)
    yield
    set_budget(None)


@pytest.fixture(scope="session")
def F2():
    return ring_make("fq:2")


@pytest.fixture(scope="session")
def F3():
    return ring_make("fq:3")


@pytest.fixture(scope="session")
def F5():
    return ring_make("fq:5")


@pytest.fixture(scope="session")
def Z6():
    return ring_make("zmod:6")
