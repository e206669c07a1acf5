import pytest

from spinorbit import make_space


@pytest.fixture(scope="session")
def space():
    return make_space(6)


@pytest.fixture(scope="session")
def space4():
    return make_space(4)
