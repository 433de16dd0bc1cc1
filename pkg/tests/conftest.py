import numpy as np
import pytest
from hypothesis import settings, strategies as st

settings.register_profile("ffspin", deadline=None, max_examples=60)
settings.load_profile("ffspin")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
