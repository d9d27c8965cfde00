"""
ChaosNDS - Fixtures communes des tests
"""

import pytest

from chaosnds.gallery import load_gallery


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: calculs longs (horizons m_6 et au-delà)")


@pytest.fixture(scope="session")
def logistic():
    return load_gallery("logistic-autonomous")


@pytest.fixture(scope="session")
def tent():
    return load_gallery("tent")


@pytest.fixture(scope="session")
def doubling():
    return load_gallery("doubling")


@pytest.fixture(scope="session")
def full_shift():
    return load_gallery("full-shift")


@pytest.fixture(scope="session")
def expanding():
    return load_gallery("expanding-family")
