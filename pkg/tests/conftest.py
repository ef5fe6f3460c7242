import os

import pytest
from hypothesis import HealthCheck, settings

from flataffine.deck import etale_example
from flataffine.scalars import declare_param

declare_param("L")
declare_param("M")

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=300,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# numeric values for the formal parameters
NUMERIC_ENV = {"E": 2.718281828459045, "L": 1.7, "M": 2.3}


@pytest.fixture(scope="session")
def etale():
    return etale_example()


@pytest.fixture(scope="session")
def gamma_tilde(etale):
    return etale.connection
