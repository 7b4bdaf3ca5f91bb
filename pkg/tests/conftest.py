import numpy as np
import pytest

from dprqkd import ChannelParams


@pytest.fixture
def table_params():
    """Reference channel parameters used throughout the simulations."""
    return ChannelParams()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
