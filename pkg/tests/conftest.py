import pytest
from hypothesis import HealthCheck, settings

from randdag.counting import build_doag_table
from randdag.labelled import build_dag_table
from randdag.policy import DegreePolicy

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("default")


@pytest.fixture(scope="session")
def doag8():
    return build_doag_table(8, 28)


@pytest.fixture(scope="session")
def dag6():
    return build_dag_table(6, 15)


@pytest.fixture(scope="session")
def policies():
    return {
        "all": DegreePolicy.all(),
        "positive": DegreePolicy.positive(),
        "max:2": DegreePolicy.bounded(2),
    }
