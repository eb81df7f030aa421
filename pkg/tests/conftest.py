import hypothesis
import numpy as np
import pytest

import thzbsa as t

hypothesis.settings.register_profile("ci", deadline=None, max_examples=60)
hypothesis.settings.load_profile("ci")


@pytest.fixture
def desk_cfg():
    return t.SystemConfig().validate()


@pytest.fixture
def tiny_cfg():
    """Small dimensions so per-entry python-loop oracles stay fast."""
    return t.SystemConfig(N_T=16, N_R=4, K=2, N_RF=2, L=3, M=4, B=30e9).validate()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
