import pytest

from qmt import generators


@pytest.fixture(scope="session")
def three():
    return generators.three_path()


@pytest.fixture(scope="session")
def coin():
    return generators.coin()


@pytest.fixture(scope="session")
def small_suite():
    return generators.suite(40, seed=7, max_n=4)
