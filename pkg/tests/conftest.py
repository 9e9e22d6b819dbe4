import numpy as np
import pytest

from restorekit.image import RasterImage, gaussian_kernel
from restorekit.ops import convolve2d


def make_scene(seed: int, h: int = 96, w: int = 96) -> RasterImage:
    """Synthetic test scene: saturated shapes (sparse dark channel), a bright
    gray card to anchor airlight estimation, and a few dark patches."""
    rng = np.random.default_rng(seed)
    img = np.empty((h, w, 3))
    base = rng.uniform(0.25, 0.5, size=3)
    ramp = np.linspace(0.75, 1.15, h)[:, None, None]
    img[:] = np.clip(base * ramp, 0.0, 1.0)
    for _ in range(7):
        hh = int(rng.integers(h // 8, h // 2))
        ww = int(rng.integers(w // 8, w // 2))
        y0 = int(rng.integers(0, h - hh))
        x0 = int(rng.integers(0, w - ww))
        color = rng.uniform(0.35, 0.95, size=3)
        color[rng.integers(0, 3)] = rng.uniform(0.0, 0.05)
        img[y0 : y0 + hh, x0 : x0 + ww] = color
    # dark corner patch
    dh, dw = h // 6, w // 6
    img[h - dh :, : dw] = rng.uniform(0.0, 0.04, size=3)
    # bright near-neutral card, large enough to survive dark-channel erosion
    ch, cw = max(4, h // 4), max(4, w // 4)
    y0 = int(rng.integers(0, h - ch))
    x0 = int(rng.integers(0, w - cw))
    img[y0 : y0 + ch, x0 : x0 + cw] = rng.uniform(0.86, 0.92, size=3)
    return RasterImage(img)


def smooth_scene(seed: int, h: int = 96, w: int = 96, sigma: float = 1.5) -> RasterImage:
    """Band-limited scene for deconvolution round trips."""
    return convolve2d(make_scene(seed, h, w), gaussian_kernel(sigma))


def random_image(seed: int, h: int, w: int, channels: int = 1) -> RasterImage:
    rng = np.random.default_rng(seed)
    return RasterImage(rng.uniform(0.0, 1.0, size=(h, w, channels)))


@pytest.fixture
def scene():
    return make_scene(7)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
