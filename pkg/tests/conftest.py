import numpy as np
import pytest

from recroa import IntegratorConfig, linear, paper2d


@pytest.fixture(scope="session")
def field2d():
    return paper2d()


@pytest.fixture(scope="session")
def lin1():
    return linear(rate=1.0, dimension=1)


@pytest.fixture(scope="session")
def lin2():
    return linear(rate=1.0, dimension=2)


@pytest.fixture(scope="session")
def icfg():
    return IntegratorConfig(tau_s=0.5, substeps=10)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
