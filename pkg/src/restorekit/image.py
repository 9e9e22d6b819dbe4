"""Image and kernel containers plus deterministic file I/O.

Images are stored as (H, W, C) float64 arrays with intensities in [0, 1],
C in {1, 3}, row-major and channel-interleaved. Kernels are small (odd x odd)
2-D tap arrays. PNG I/O goes through OpenCV (8- and 16-bit); binary PPM/PGM
is handled natively so 16-bit P5/P6 round-trips are under our control.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import cv2
import numpy as np

# Validation slack: arithmetic on in-range values may wobble by a few ulp,
# clamping to [0, 1] remains an explicit, caller-side operation.
_RANGE_SLACK = 1e-9

# Rec. 601 luma weights, used everywhere a single luminance channel is needed.
_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


class FormatError(ValueError):
    """Raised for files or arrays whose layout we do not support."""


@dataclass(frozen=True)
class RasterImage:
    """An (H, W, C) float64 intensity field with values in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim == 2:
            data = data[:, :, None]
        if data.ndim != 3 or data.shape[2] not in (1, 3):
            raise FormatError(f"expected (H, W, 1|3) data, got shape {np.shape(self.data)}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError("image must have at least one pixel")
        if not np.all(np.isfinite(data)):
            raise ValueError("image contains non-finite values")
        if data.min() < -_RANGE_SLACK or data.max() > 1.0 + _RANGE_SLACK:
            raise ValueError(
                f"intensities outside [0, 1]: min={data.min():.6g} max={data.max():.6g}; "
                "clamp explicitly before constructing"
            )
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RasterImage":
        return cls(np.asarray(arr, dtype=np.float64))

    @classmethod
    def constant(cls, height: int, width: int, value, channels: int = 3) -> "RasterImage":
        data = np.empty((height, width, channels))
        data[:] = np.asarray(value, dtype=np.float64)
        return cls(data)

    def to_array(self) -> np.ndarray:
        return self.data.copy()


def clamp01(arr: np.ndarray) -> np.ndarray:
    """Explicit clamp to [0, 1]; the one sanctioned way to re-enter range."""
    return np.clip(arr, 0.0, 1.0)


def luminance(img: RasterImage) -> np.ndarray:
    """Rec. 601 luminance as an (H, W) array; identity for 1-channel input."""
    if img.channels == 1:
        return img.data[:, :, 0].copy()
    return img.data @ _LUMA_WEIGHTS


def gray(img: RasterImage) -> RasterImage:
    """Single-channel luminance image."""
    return RasterImage(clamp01(luminance(img))[:, :, None])


@dataclass(frozen=True)
class Kernel2D:
    """Odd-sized 2-D tap array; `normalized` asserts non-negative taps summing to 1."""

    taps: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=np.float64)
        if taps.ndim != 2:
            raise ValueError(f"kernel taps must be 2-D, got shape {taps.shape}")
        if taps.shape[0] % 2 == 0 or taps.shape[1] % 2 == 0:
            raise ValueError(f"kernel dimensions must be odd, got {taps.shape}")
        if not np.all(np.isfinite(taps)):
            raise ValueError("kernel contains non-finite taps")
        if self.normalized:
            if taps.min() < 0.0:
                raise ValueError("normalized blur kernels must have non-negative taps")
            if abs(taps.sum() - 1.0) > 1e-6:
                raise ValueError(f"normalized kernel taps sum to {taps.sum():.8f}, expected 1")
        object.__setattr__(self, "taps", taps)

    @property
    def height(self) -> int:
        return self.taps.shape[0]

    @property
    def width(self) -> int:
        return self.taps.shape[1]

    @property
    def radius(self) -> int:
        return max(self.taps.shape[0] // 2, self.taps.shape[1] // 2)


def identity_kernel() -> Kernel2D:
    return Kernel2D(np.array([[1.0]]))


def box_kernel(size: int) -> Kernel2D:
    if size < 1 or size % 2 == 0:
        raise ValueError("box kernel size must be odd and positive")
    return Kernel2D(np.full((size, size), 1.0 / (size * size)))


def gaussian_kernel(sigma: float, radius: int | None = None) -> Kernel2D:
    """Isotropic Gaussian PSF truncated at ceil(3*sigma) unless radius given."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if radius is None:
        radius = int(np.ceil(3.0 * sigma))
    ax = np.arange(-radius, radius + 1, dtype=np.float64)
    g1 = np.exp(-0.5 * (ax / sigma) ** 2)
    taps = np.outer(g1, g1)
    return Kernel2D(taps / taps.sum())


def motion_kernel(length: int, angle_deg: float) -> Kernel2D:
    """Line PSF of the given pixel length at the given angle."""
    if length < 1:
        raise ValueError("motion length must be >= 1")
    size = length if length % 2 == 1 else length + 1
    taps = np.zeros((size, size))
    center = size // 2
    theta = np.deg2rad(angle_deg)
    dx, dy = np.cos(theta), np.sin(theta)
    for t in np.linspace(-(length - 1) / 2.0, (length - 1) / 2.0, length):
        x = int(round(center + t * dx))
        y = int(round(center + t * dy))
        if 0 <= x < size and 0 <= y < size:
            taps[y, x] += 1.0
    return Kernel2D(taps / taps.sum())


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------

_PPM_EXTS = {".ppm", ".pgm"}


def load_image(path: str | os.PathLike) -> RasterImage:
    """Read an 8- or 16-bit PNG/PPM/PGM, mapping intensities to [0, 1]."""
    path = os.fspath(path)
    if not os.path.exists(path):
        raise OSError(f"no such file: {path}")
    ext = os.path.splitext(path)[1].lower()
    if ext in _PPM_EXTS:
        return _load_pnm(path)
    raw = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise OSError(f"could not decode image: {path}")
    if raw.dtype == np.uint8:
        maxval = 255.0
    elif raw.dtype == np.uint16:
        maxval = 65535.0
    else:
        raise FormatError(f"unsupported sample type {raw.dtype} in {path}")
    if raw.ndim == 2:
        data = raw[:, :, None].astype(np.float64)
    elif raw.ndim == 3 and raw.shape[2] == 3:
        data = raw[:, :, ::-1].astype(np.float64)  # BGR -> RGB
    else:
        raise FormatError(f"unsupported channel count {raw.shape[2:]} in {path}")
    return RasterImage(data / maxval)


def save_image(img: RasterImage, path: str | os.PathLike, bit_depth: int = 8) -> None:
    """Write PNG or binary PPM/PGM at the requested bit depth."""
    path = os.fspath(path)
    if bit_depth not in (8, 16):
        raise ValueError("bit_depth must be 8 or 16")
    maxval = (1 << bit_depth) - 1
    quant = np.floor(clamp01(img.data) * maxval + 0.5)
    ext = os.path.splitext(path)[1].lower()
    if ext in _PPM_EXTS:
        _save_pnm(quant, maxval, path)
        return
    arr = quant.astype(np.uint8 if bit_depth == 8 else np.uint16)
    if arr.shape[2] == 1:
        arr = arr[:, :, 0]
    else:
        arr = arr[:, :, ::-1]  # RGB -> BGR
    if not cv2.imwrite(path, arr):
        raise OSError(f"could not write image: {path}")


def _load_pnm(path: str) -> RasterImage:
    with open(path, "rb") as fh:
        blob = fh.read()
    magic = blob[:2]
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"unsupported PNM magic {magic!r} in {path}")
    fields: list[int] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(blob) and blob[pos : pos + 1].isspace():
            pos += 1
        if pos < len(blob) and blob[pos : pos + 1] == b"#":
            while pos < len(blob) and blob[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"truncated PNM header in {path}")
        fields.append(int(blob[start:pos]))
    pos += 1  # single whitespace byte terminates the header
    width, height, maxval = fields
    if maxval not in (255, 65535):
        raise FormatError(f"unsupported PNM maxval {maxval} in {path}")
    channels = 3 if magic == b"P6" else 1
    count = width * height * channels
    dtype = np.dtype(">u2") if maxval == 65535 else np.uint8
    body = np.frombuffer(blob, dtype=dtype, count=count, offset=pos)
    if body.size < count:
        raise OSError(f"truncated PNM body in {path}")
    data = body.astype(np.float64).reshape(height, width, channels)
    return RasterImage(data / maxval)


def _save_pnm(quant: np.ndarray, maxval: int, path: str) -> None:
    height, width, channels = quant.shape
    magic = b"P6" if channels == 3 else b"P5"
    dtype = np.dtype(">u2") if maxval == 65535 else np.uint8
    header = b"%s\n%d %d\n%d\n" % (magic, width, height, maxval)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(quant.astype(dtype).tobytes())
