import numpy as np
import pytest

from texdesign.imageio import GrayImage, QuantizedImage


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def random_quantized(rng, height, width, levels) -> QuantizedImage:
    data = rng.integers(0, levels, size=(height, width), dtype=np.int16)
    return QuantizedImage(width=width, height=height, levels=levels, data=data)


def random_gray(rng, height, width) -> GrayImage:
    return GrayImage.from_array(
        rng.integers(0, 256, size=(height, width), dtype=np.uint8).copy()
    )
