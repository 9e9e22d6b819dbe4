"""Full-reference quality metrics: PSNR and SSIM, plus record serialization."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass

import numpy as np

from .image import RasterImage, gaussian_kernel, luminance
from .ops import conv2d_array

PSNR_CAP = 99.0  # sentinel for zero-error pairs, keeps reports finite


def mse(a: RasterImage, b: RasterImage) -> float:
    if a.data.shape != b.data.shape:
        raise ValueError(f"shape mismatch: {a.data.shape} vs {b.data.shape}")
    diff = a.data - b.data
    return float(np.mean(diff * diff))


def psnr(a: RasterImage, b: RasterImage, peak: float = 1.0) -> float:
    """10*log10(peak^2 / MSE); identical images return the 99 dB sentinel."""
    err = mse(a, b)
    if err == 0.0:
        return PSNR_CAP
    return float(10.0 * np.log10(peak * peak / err))


def ssim(a: RasterImage, b: RasterImage, window: int = 11, sigma_w: float = 1.5,
         k1: float = 0.01, k2: float = 0.03, peak: float = 1.0) -> float:
    """Mean structural similarity over a Gaussian-weighted local window.

    Computed on Rec. 601 luminance for 3-channel inputs; the window slides
    with reflect boundary so the map covers the full image.
    """
    if a.data.shape != b.data.shape:
        raise ValueError(f"shape mismatch: {a.data.shape} vs {b.data.shape}")
    if window > min(a.height, a.width):
        raise ValueError(f"window {window} exceeds image dims {(a.height, a.width)}")
    x = luminance(a)
    y = luminance(b)
    taps = gaussian_kernel(sigma_w, radius=window // 2).taps

    def smooth(arr):
        return conv2d_array(arr, taps, "reflect")

    mu_x = smooth(x)
    mu_y = smooth(y)
    var_x = smooth(x * x) - mu_x * mu_x
    var_y = smooth(y * y) - mu_y * mu_y
    cov = smooth(x * y) - mu_x * mu_y
    c1 = (k1 * peak) ** 2
    c2 = (k2 * peak) ** 2
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


@dataclass(frozen=True)
class QualityRecord:
    image_id: str
    psnr: float
    ssim: float
    mse: float

    def __post_init__(self):
        if self.mse < 0.0:
            raise ValueError("mse must be >= 0")
        if not (-1.0 - 1e-9 <= self.ssim <= 1.0 + 1e-9):
            raise ValueError(f"ssim outside [-1, 1]: {self.ssim}")
        if self.mse > 0.0:
            expected = 10.0 * np.log10(1.0 / self.mse)
            if abs(self.psnr - expected) > 1e-6:
                raise ValueError("psnr inconsistent with mse")


def evaluate_pair(image_id: str, restored: RasterImage, reference: RasterImage) -> QualityRecord:
    return QualityRecord(image_id, psnr(restored, reference), ssim(restored, reference),
                         mse(restored, reference))


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["image_id", "psnr", "ssim", "mse"])
    for r in records:
        writer.writerow([r.image_id, f"{r.psnr:.6f}", f"{r.ssim:.6f}", f"{r.mse:.8e}"])
    return buf.getvalue()


def summarize(records) -> dict:
    records = list(records)
    if not records:
        return {"count": 0}
    psnrs = np.array([r.psnr for r in records])
    ssims = np.array([r.ssim for r in records])
    return {
        "count": len(records),
        "psnr_mean": float(psnrs.mean()),
        "psnr_median": float(np.median(psnrs)),
        "ssim_mean": float(ssims.mean()),
        "ssim_median": float(np.median(ssims)),
    }


def records_to_json(records, summary: bool = True) -> str:
    records = list(records)
    payload: dict = {"records": [asdict(r) for r in records]}
    if summary:
        payload["summary"] = summarize(records)
    return json.dumps(payload, indent=2, sort_keys=True)
