import os

import pytest
from hypothesis import HealthCheck, settings

# Keep test runs from writing rotating log files into the working tree
os.environ.setdefault("FQGEOM_ENABLE_FILE_LOGGING", "false")

settings.register_profile(
    "fqgeom",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("fqgeom")

from geometry import dot_form  # noqa: E402
from gf import make_field  # noqa: E402
from groups import orthogonal_group  # noqa: E402


@pytest.fixture(scope="session")
def f7():
    return make_field(7)


@pytest.fixture(scope="session")
def dot3():
    return dot_form(3, 2)


@pytest.fixture(scope="session")
def dot5():
    return dot_form(5, 2)


@pytest.fixture(scope="session")
def group3(dot3):
    return orthogonal_group(dot3)
