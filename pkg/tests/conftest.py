import pytest

from lieduflo.liealg import preset


@pytest.fixture
def sl2():
    return preset("sl2")
