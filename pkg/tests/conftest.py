import numpy as np
import pytest

from spectralfactors import ToleranceConfig, conjugate_phase
from spectralfactors.demo import reference_model, reference_values


@pytest.fixture(scope="session")
def config():
    return ToleranceConfig()


@pytest.fixture(scope="session")
def ref_model():
    return reference_model()


@pytest.fixture(scope="session")
def ref_values():
    return reference_values()


@pytest.fixture(scope="session")
def ref_cp(ref_model):
    return conjugate_phase(ref_model)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
