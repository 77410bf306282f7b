import os
import random

import pytest
from hypothesis import HealthCheck, settings

from pdel.algebra import FiniteLattice
from pdel.art import art_event, art_model

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def vee():
    """Up-sets of s0 <= s1, s0 <= s2; bit s is the principal up-set of s."""
    return FiniteLattice([0b110, 0, 0])


@pytest.fixture
def art():
    return art_model(), art_event()
