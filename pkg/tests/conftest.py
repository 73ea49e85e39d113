import numpy as np
import pytest
from hypothesis import settings

from qsd import DiscriminationProblem, coherent_state

settings.register_profile("default", max_examples=30, deadline=None)
settings.register_profile("fast", max_examples=5, deadline=None)
settings.load_profile("default")


@pytest.fixture
def bpsk():
    def make(alpha=1.0, prior=0.5):
        return DiscriminationProblem(coherent_state([alpha]), coherent_state([-alpha]), prior)

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
