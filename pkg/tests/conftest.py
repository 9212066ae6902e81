import numpy as np
import pytest

from engine.config import RunConfig
from engine.partitions import basic_crossing, identity, parse_partition


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def crossing():
    return basic_crossing('oo')


@pytest.fixture
def half_crossing():
    """The 3-leg reversal /|\\."""
    return parse_partition('ooo|ooo:(1,6)(2,5)(3,4)')


@pytest.fixture
def identity_oo():
    return identity('oo')


@pytest.fixture
def fast_config():
    return RunConfig(samples=200)
