import pytest

from ihg import EvaluationPoint, Parameters


@pytest.fixture
def generic_params():
    return Parameters(-0.3, 0.2, 0.1, 1.0, 2.0)


@pytest.fixture
def far_point():
    return EvaluationPoint(10, 1, 10, 1)
