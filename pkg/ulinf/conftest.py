"""
Shared fixtures for the ULINF test suite
"""

import numpy as np
import pytest

from ulinf import data_io
from ulinf.inference import partition


@pytest.fixture
def elephants():
    return data_io.load("elephants")


@pytest.fixture
def elephants_sample(elephants):
    return partition(elephants.values)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
