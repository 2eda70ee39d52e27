import numpy as np
import pytest
from hypothesis import settings

from beamlink import ScenarioConfig

settings.register_profile("deterministic", derandomize=True, deadline=None)
settings.load_profile("deterministic")


@pytest.fixture
def rng():
    return np.random.default_rng(0xBEA171)


@pytest.fixture
def small_config():
    """Desk-scale scenario for fast protocol/sweep tests."""
    return ScenarioConfig(runs=5, normalization_subruns=10, scatterer_count=50,
                          snr_grid_db=(0.0, 20.0), seed=1234)


def random_channel(rng, k=2, max_condition=1e6):
    """Well-conditioned i.i.d. complex Gaussian channel (test oracle input)."""
    while True:
        h = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) \
            / np.sqrt(2.0)
        s = np.linalg.svd(h, compute_uv=False)
        if s[0] / s[-1] <= max_condition:
            return h
