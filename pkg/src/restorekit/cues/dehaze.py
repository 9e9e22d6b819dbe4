"""Dark-channel dehazing chain: dark channel, airlight, transmission,
guided-filter refinement, and the haze-free estimate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..image import RasterImage, clamp01, luminance
from ..ops import box_mean, pad2d

# Standard dark-channel-prior constants.
DEFAULT_OMEGA = 0.95
DEFAULT_PATCH_RADIUS = 7
DEFAULT_T_FLOOR = 0.1
DEFAULT_TOP_FRACTION = 0.001


@dataclass(frozen=True)
class TransmissionMap:
    """Per-pixel transmission in [floor, 1], same spatial dims as its source."""

    values: np.ndarray
    floor: float = DEFAULT_T_FLOOR

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"transmission map must be 2-D, got shape {values.shape}")
        if values.min() < self.floor - 1e-12 or values.max() > 1.0 + 1e-12:
            raise ValueError(
                f"transmission values outside [{self.floor}, 1]: "
                f"min={values.min():.6g} max={values.max():.6g}"
            )
        object.__setattr__(self, "values", values)

    def as_image(self) -> RasterImage:
        return RasterImage(clamp01(self.values)[:, :, None])


def _min_filter(arr: np.ndarray, radius: int) -> np.ndarray:
    """Separable (2r+1)^2 minimum filter with reflect boundary."""
    if radius == 0:
        return arr.copy()
    size = 2 * radius + 1
    padded = pad2d(arr, radius, 0, "reflect")
    rows = sliding_window_view(padded, size, axis=0).min(axis=-1)
    padded = pad2d(rows, 0, radius, "reflect")
    return sliding_window_view(padded, size, axis=1).min(axis=-1)


def dark_channel(img: RasterImage, patch_radius: int = DEFAULT_PATCH_RADIUS) -> RasterImage:
    """Channel minimum followed by a patch minimum (reflect boundary)."""
    if img.channels != 3:
        raise ValueError("dark channel requires a 3-channel image")
    if patch_radius < 0:
        raise ValueError("patch_radius must be >= 0")
    cmin = img.data.min(axis=2)
    return RasterImage(_min_filter(cmin, patch_radius)[:, :, None])


def estimate_atmospheric_light(img: RasterImage, dark: RasterImage,
                               top_fraction: float = DEFAULT_TOP_FRACTION) -> np.ndarray:
    """Airlight as the per-channel mean over the brightest dark-channel pixels."""
    if img.channels != 3:
        raise ValueError("atmospheric light estimation requires a 3-channel image")
    if dark.height != img.height or dark.width != img.width:
        raise ValueError("dark channel dimensions do not match the image")
    if not (0.0 < top_fraction <= 1.0):
        raise ValueError(f"top_fraction must be in (0, 1], got {top_fraction}")
    flat_dark = dark.data[:, :, 0].ravel()
    count = max(1, int(round(top_fraction * flat_dark.size)))
    idx = np.argpartition(-flat_dark, count - 1)[:count]
    if idx.size == 0:  # degenerate selection: fall back to the brightest pixel
        idx = np.array([int(np.argmax(luminance(img)))])
    pixels = img.data.reshape(-1, 3)[idx]
    return pixels.mean(axis=0)


def transmission_map(img: RasterImage, airlight: np.ndarray, omega: float = DEFAULT_OMEGA,
                     patch_radius: int = DEFAULT_PATCH_RADIUS,
                     t_floor: float = DEFAULT_T_FLOOR) -> TransmissionMap:
    """Dark-channel transmission 1 - omega * DP(I/A), clamped to [t_floor, 1]."""
    a = np.asarray(airlight, dtype=np.float64).reshape(-1)
    if a.size == 1:
        a = np.repeat(a, 3)
    if a.size != 3 or a.min() <= 0.0:
        raise ValueError(f"airlight channels must be positive, got {airlight}")
    if not (0.0 < omega <= 1.0):
        raise ValueError(f"omega must be in (0, 1], got {omega}")
    normalized = img.data / a
    cmin = normalized.min(axis=2)
    dp = _min_filter(cmin, patch_radius)
    t = np.clip(1.0 - omega * dp, t_floor, 1.0)
    return TransmissionMap(t, floor=t_floor)


def guided_filter(guide: RasterImage, src: RasterImage, radius: int, eps: float) -> RasterImage:
    """Local linear model filter: output = mean_a * guide + mean_b per pixel.

    The guide is reduced to luminance; src is filtered per channel. Windows are
    (2r+1)^2 boxes with reflect boundary, matching the naive regression oracle.
    """
    if guide.height != src.height or guide.width != src.width:
        raise ValueError("guide and src dimensions must match")
    if radius < 1:
        raise ValueError("radius must be >= 1")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    g = luminance(guide)
    mean_g = box_mean(g, radius)
    var_g = box_mean(g * g, radius) - mean_g * mean_g
    out = np.empty_like(src.data)
    for c in range(src.channels):
        s = src.data[:, :, c]
        mean_s = box_mean(s, radius)
        cov_gs = box_mean(g * s, radius) - mean_g * mean_s
        a = cov_gs / (var_g + eps)
        b = mean_s - a * mean_g
        out[:, :, c] = box_mean(a, radius) * g + box_mean(b, radius)
    return RasterImage(clamp01(out))


def dehaze_estimate(img: RasterImage, t: TransmissionMap, airlight: np.ndarray,
                    t_floor: float = DEFAULT_T_FLOOR) -> RasterImage:
    """Invert the haze model: (I - A) / max(t, floor) + A, clamped."""
    a = np.asarray(airlight, dtype=np.float64).reshape(-1)
    if a.size == 1:
        a = np.repeat(a, img.channels)
    a = a[: img.channels]
    if t.values.shape != (img.height, img.width):
        raise ValueError("transmission map dimensions do not match the image")
    denom = np.maximum(t.values, t_floor)[:, :, None]
    out = (img.data - a) / denom + a
    return RasterImage(clamp01(out))


def haze_cues(img: RasterImage, omega: float = DEFAULT_OMEGA,
              patch_radius: int = DEFAULT_PATCH_RADIUS, t_floor: float = DEFAULT_T_FLOOR,
              top_fraction: float = DEFAULT_TOP_FRACTION, guided_radius: int = 30,
              guided_eps: float = 1e-3) -> tuple[RasterImage, RasterImage]:
    """Full chain: returns (haze-free primary estimate, refined transmission map)."""
    dark = dark_channel(img, patch_radius)
    airlight = estimate_atmospheric_light(img, dark, top_fraction)
    t_raw = transmission_map(img, airlight, omega, patch_radius, t_floor)
    refined = guided_filter(img, t_raw.as_image(), guided_radius, guided_eps)
    t = TransmissionMap(np.clip(refined.data[:, :, 0], t_floor, 1.0), floor=t_floor)
    primary = dehaze_estimate(img, t, airlight, t_floor)
    return primary, t.as_image()
