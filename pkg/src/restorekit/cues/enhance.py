"""Contrast and color cues: contrast-limited AHE and a chromaticity map."""

from __future__ import annotations

import numpy as np

from ..image import RasterImage, clamp01, luminance

DEFAULT_TILE = 64
DEFAULT_CLIP_LIMIT = 2.0
DEFAULT_COLOR_EPS = 1e-6

_BINS = 256


def color_map(img: RasterImage, eps: float = DEFAULT_COLOR_EPS) -> RasterImage:
    """Chromaticity per pixel: 3*I / sum_c(I_c), stored rescaled into [0, 1].

    The raw map lives in [0, 3]; it is divided by 3 for storage so every cue
    image shares the same range.
    """
    if img.channels != 3:
        raise ValueError("color map requires a 3-channel image")
    total = img.data.sum(axis=2, keepdims=True)
    raw = np.clip(3.0 * img.data / (total + eps), 0.0, 3.0)
    return RasterImage(raw / 3.0)


def _clipped_cdf(hist: np.ndarray, clip_limit: float) -> np.ndarray:
    """Equalization mapping for one tile: clip the histogram at clip_limit
    times the uniform level, redistribute the excess, and normalize the CDF."""
    n = hist.sum()
    if n == 0:
        return np.linspace(1.0 / _BINS, 1.0, _BINS)
    limit = clip_limit * n / _BINS
    clipped = np.minimum(hist, limit)
    clipped += (n - clipped.sum()) / _BINS
    return np.cumsum(clipped) / n


def clahe(img: RasterImage, tile: int = DEFAULT_TILE,
          clip_limit: float = DEFAULT_CLIP_LIMIT) -> RasterImage:
    """Contrast-limited adaptive histogram equalization on luminance.

    The image is split into tiles of roughly `tile` x `tile` pixels, each tile
    gets a clipped equalization mapping, and per-pixel values interpolate
    bilinearly between the four surrounding tile mappings. Chroma is preserved
    by scaling all channels with the luminance ratio. Images smaller than one
    tile fall back to a single global mapping.
    """
    if tile < 2:
        raise ValueError(f"tile must be >= 2, got {tile}")
    if clip_limit < 1.0:
        raise ValueError(f"clip_limit must be >= 1, got {clip_limit}")
    y = luminance(img)
    h, w = y.shape
    bins = np.minimum((y * _BINS).astype(np.int64), _BINS - 1)
    nty, ntx = max(1, h // tile), max(1, w // tile)
    if nty == 1 and ntx == 1:
        mapping = _clipped_cdf(np.bincount(bins.ravel(), minlength=_BINS), clip_limit)
        y_new = mapping[bins]
    else:
        edges_y = np.round(np.arange(nty + 1) * h / nty).astype(np.int64)
        edges_x = np.round(np.arange(ntx + 1) * w / ntx).astype(np.int64)
        maps = np.empty((nty, ntx, _BINS))
        for ti in range(nty):
            for tj in range(ntx):
                patch = bins[edges_y[ti]:edges_y[ti + 1], edges_x[tj]:edges_x[tj + 1]]
                maps[ti, tj] = _clipped_cdf(np.bincount(patch.ravel(), minlength=_BINS),
                                            clip_limit)
        cy = (edges_y[:-1] + edges_y[1:] - 1) / 2.0
        cx = (edges_x[:-1] + edges_x[1:] - 1) / 2.0
        iy0, wy = _interp_coords(np.arange(h), cy)
        ix0, wx = _interp_coords(np.arange(w), cx)
        iy0 = iy0[:, None]
        wy = wy[:, None]
        iy1 = np.minimum(iy0 + 1, nty - 1)
        ix1 = np.minimum(ix0 + 1, ntx - 1)
        y_new = (
            (1 - wy) * (1 - wx) * maps[iy0, ix0, bins]
            + (1 - wy) * wx * maps[iy0, ix1, bins]
            + wy * (1 - wx) * maps[iy1, ix0, bins]
            + wy * wx * maps[iy1, ix1, bins]
        )
    if img.channels == 1:
        return RasterImage(clamp01(y_new)[:, :, None])
    ratio = y_new / (y + 1e-6)
    return RasterImage(clamp01(img.data * ratio[:, :, None]))


def _interp_coords(coords: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lower tile index and fractional weight for each pixel coordinate;
    pixels beyond the first/last tile center clamp to weight 0/1."""
    i0 = np.clip(np.searchsorted(centers, coords, side="right") - 1, 0, len(centers) - 1)
    i1 = np.minimum(i0 + 1, len(centers) - 1)
    span = centers[i1] - centers[i0]
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(span > 0, (coords - centers[i0]) / np.where(span > 0, span, 1.0), 0.0)
    return i0, np.clip(w, 0.0, 1.0)
