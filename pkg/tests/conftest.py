import pytest

from isocrystals import CoeffContext


@pytest.fixture
def c1():
    return CoeffContext(2, 1, N=64)


@pytest.fixture
def c2():
    return CoeffContext(2, 2, N=64)


@pytest.fixture
def c3():
    return CoeffContext(3, 2, N=40)
