import pytest

from discrimnet.network import certification_correlations, conjugated_strategy, honest_strategy


@pytest.fixture(scope="session")
def honest():
    return honest_strategy()


@pytest.fixture(scope="session")
def conjugated():
    return conjugated_strategy()


@pytest.fixture(scope="session")
def honest_p1(honest):
    return certification_correlations(honest)


@pytest.fixture(scope="session")
def conjugated_p1(conjugated):
    return certification_correlations(conjugated)
