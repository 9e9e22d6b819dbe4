"""Shared numerical primitives: padding, convolution, pooling, box means."""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .image import Kernel2D, RasterImage

_PAD_MODES = {"reflect": "reflect", "replicate": "edge"}

# Direct convolution wins for small kernels; FFT takes over past this tap count.
_FFT_TAP_THRESHOLD = 49


def pad2d(arr: np.ndarray, ry: int, rx: int, boundary: str) -> np.ndarray:
    """Pad the two leading axes of `arr` by (ry, rx) on each side."""
    if boundary not in _PAD_MODES:
        raise ValueError(f"unknown boundary mode {boundary!r}")
    widths = [(ry, ry), (rx, rx)] + [(0, 0)] * (arr.ndim - 2)
    return np.pad(arr, widths, mode=_PAD_MODES[boundary])


def conv2d_array(arr: np.ndarray, taps: np.ndarray, boundary: str = "reflect",
                 force: str | None = None) -> np.ndarray:
    """True 2-D convolution of an (H, W) or (H, W, C) array with odd-sized taps.

    Output has the input's shape. `force` pins the backend to "direct" or
    "fft"; by default small kernels run direct and large ones through the FFT,
    which must agree within 1e-5.
    """
    taps = np.asarray(taps, dtype=np.float64)
    kh, kw = taps.shape
    if kh > arr.shape[0] or kw > arr.shape[1]:
        raise ValueError(
            f"kernel {taps.shape} larger than image {arr.shape[:2]}"
        )
    squeeze = arr.ndim == 2
    data = arr[:, :, None] if squeeze else arr
    ry, rx = kh // 2, kw // 2
    padded = pad2d(np.asarray(data, dtype=np.float64), ry, rx, boundary)
    backend = force or ("direct" if taps.size <= _FFT_TAP_THRESHOLD else "fft")
    if backend == "direct":
        flipped = taps[::-1, ::-1]
        windows = sliding_window_view(padded, (kh, kw), axis=(0, 1))
        out = np.einsum("hwcij,ij->hwc", windows, flipped, optimize=True)
    elif backend == "fft":
        out = _conv_fft(padded, taps, data.shape[:2])
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return out[:, :, 0] if squeeze else out


def _conv_fft(padded: np.ndarray, taps: np.ndarray, out_shape: tuple[int, int]) -> np.ndarray:
    """Linear convolution of the padded image via zero-padded FFT."""
    kh, kw = taps.shape
    fh = padded.shape[0] + kh - 1
    fw = padded.shape[1] + kw - 1
    spec_k = np.fft.rfft2(taps, s=(fh, fw))
    out = np.empty((out_shape[0], out_shape[1], padded.shape[2]))
    for c in range(padded.shape[2]):
        spec = np.fft.rfft2(padded[:, :, c], s=(fh, fw))
        full = np.fft.irfft2(spec * spec_k, s=(fh, fw))
        # full[y] holds conv at y; the original grid starts at 2*radius.
        out[:, :, c] = full[kh - 1 : kh - 1 + out_shape[0], kw - 1 : kw - 1 + out_shape[1]]
    return out


def convolve2d(img: RasterImage, kernel: Kernel2D, boundary: str = "reflect") -> RasterImage:
    """Per-channel convolution preserving shape; reflect or replicate boundary.

    Normalized kernels keep results inside [0, 1] up to round-off; callers
    using unnormalized taps must clamp explicitly before re-wrapping.
    """
    return RasterImage(conv2d_array(img.data, kernel.taps, boundary))


def downsample2_array(arr: np.ndarray) -> np.ndarray:
    """2x2 average pooling of the two leading axes; odd sizes are
    replicate-padded on the bottom/right edge, so the output is ceil(dim/2)."""
    h, w = arr.shape[:2]
    pads = [(0, h % 2), (0, w % 2)] + [(0, 0)] * (arr.ndim - 2)
    a = np.pad(arr, pads, mode="edge") if (h % 2 or w % 2) else arr
    return 0.25 * (a[0::2, 0::2] + a[1::2, 0::2] + a[0::2, 1::2] + a[1::2, 1::2])


def downsample2(img: RasterImage) -> RasterImage:
    return RasterImage(downsample2_array(img.data))


def box_mean(arr: np.ndarray, radius: int, boundary: str = "reflect") -> np.ndarray:
    """Mean over the (2r+1)^2 window around each pixel of an (H, W) array,
    with boundary-padded windows (full window weight everywhere)."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius == 0:
        return np.asarray(arr, dtype=np.float64).copy()
    padded = pad2d(np.asarray(arr, dtype=np.float64), radius, radius, boundary)
    # Integral image with a zero top row/left column for clean window sums.
    acc = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1))
    np.cumsum(padded, axis=0, out=acc[1:, 1:])
    np.cumsum(acc[1:, 1:], axis=1, out=acc[1:, 1:])
    size = 2 * radius + 1
    h, w = arr.shape[:2]
    sums = (
        acc[size : size + h, size : size + w]
        - acc[0:h, size : size + w]
        - acc[size : size + h, 0:w]
        + acc[0:h, 0:w]
    )
    return sums / float(size * size)
