import numpy as np
import pytest

from wavecert.constants import assemble
from wavecert.spectral import gaussian_model
from wavecert.wavelet import make_meyer


@pytest.fixture(scope="session")
def pair():
    return make_meyer()


@pytest.fixture(scope="session")
def model():
    return gaussian_model(1.0)


@pytest.fixture(scope="session")
def ledger(pair, model):
    return assemble(pair, model, T=1.0, alpha=1.0, beta=0.75)


@pytest.fixture(scope="session")
def grid257():
    return np.linspace(0.0, 1.0, 257)
