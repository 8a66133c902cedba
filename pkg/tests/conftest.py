import numpy as np
import pytest

from qwalk import load_fixture


@pytest.fixture(scope="session")
def diamond():
    return load_fixture("diamond")


@pytest.fixture(scope="session")
def line():
    return load_fixture("line")


@pytest.fixture(scope="session")
def twisted():
    return load_fixture("twisted")


@pytest.fixture(scope="session")
def mirror():
    return load_fixture("mirror")


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)


def diamond_transmission(theta):
    """Closed-form transmission amplitude of the diamond fixture."""
    z = np.exp(1j * np.asarray(theta))
    return 8.0 * z**3 / (9.0 - z**4)
