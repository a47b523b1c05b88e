import numpy as np
import pytest

from wavesal.imagedata import Image


@pytest.fixture(scope="session", autouse=True)
def warm_backend():
    """Trigger any JIT compilation once, outside of timed assertions."""
    from wavesal.pss import PssConfig, pss_map
    from wavesal.wavelet import dwt2

    rng = np.random.default_rng(0)
    img = Image(rng.random((8, 8)))
    dwt2(img, levels=1)
    pss_map(img, PssConfig(s_min=1, s_max=3, bins=4))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_image(rng):
    return Image(rng.random((16, 16)))
