"""Multi-degradation synthesis: darken, blur, haze, and noise stages.

A recipe lists the stages to compose, always applied in the fixed order
darken -> blur -> haze -> noise, skipping absent stages. Every random draw is
derived from an explicit seed, so batch synthesis is reproducible bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .image import Kernel2D, RasterImage, clamp01, gaussian_kernel, motion_kernel
from .ops import convolve2d

SIGMA_MAX = 0.3  # synthetic AWGN range tops out at 30%

# Photon count per unit intensity for the optional shot-noise stage.
POISSON_SCALE = 1000.0

# Random blur draws for mixed datasets: Gaussian sigma in pixels, or a
# motion line of odd length between these bounds at a uniform angle.
GAUSS_SIGMA_RANGE = (1.0, 4.0)
MOTION_LENGTH_RANGE = (5, 21)


@dataclass(frozen=True)
class DarkenStage:
    gain: float
    gamma: float

    def __post_init__(self):
        if not (0.0 < self.gain <= 1.0):
            raise ValueError(f"darken gain must be in (0, 1], got {self.gain}")
        if self.gamma < 1.0:
            raise ValueError(f"darken gamma must be >= 1, got {self.gamma}")


@dataclass(frozen=True)
class HazeStage:
    airlight: tuple[float, float, float]
    transmission: float | np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.airlight, dtype=np.float64))
        if a.size == 1:
            a = np.repeat(a, 3)
        if a.size != 3 or a.min() <= 0.0 or a.max() > 1.0:
            raise ValueError(f"airlight must be per-channel in (0, 1], got {self.airlight}")
        object.__setattr__(self, "airlight", tuple(float(v) for v in a))
        t = self.transmission
        t_arr = np.asarray(t, dtype=np.float64)
        if t_arr.min() <= 0.0 or t_arr.max() > 1.0:
            raise ValueError("transmission values must lie in (0, 1]")


@dataclass(frozen=True)
class NoiseStage:
    sigma: float
    poisson: bool = False
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.sigma <= SIGMA_MAX):
            raise ValueError(f"noise sigma must be in [0, {SIGMA_MAX}], got {self.sigma}")


@dataclass(frozen=True)
class DegradationRecipe:
    darken: DarkenStage | None = None
    blur: Kernel2D | None = None
    haze: HazeStage | None = None
    noise: NoiseStage | None = None

    def __post_init__(self):
        if self.darken is None and self.blur is None and self.haze is None and self.noise is None:
            raise ValueError("recipe must contain at least one stage")


def apply_darken(img: RasterImage, gain: float, gamma: float) -> RasterImage:
    """Low-light model: gain * img**gamma, clamped."""
    stage = DarkenStage(gain, gamma)  # validates ranges
    return RasterImage(clamp01(stage.gain * np.power(img.data, stage.gamma)))


def apply_haze(img: RasterImage, airlight, transmission) -> RasterImage:
    """Scattering model img*t + A*(1 - t) with per-channel airlight A."""
    stage = HazeStage(airlight, transmission)
    a = np.asarray(stage.airlight)[: img.channels]
    t = np.asarray(stage.transmission, dtype=np.float64)
    if t.ndim == 2:
        if t.shape != (img.height, img.width):
            raise ValueError(f"transmission map {t.shape} does not match image "
                             f"{(img.height, img.width)}")
        t = t[:, :, None]
    out = img.data * t + a * (1.0 - t)
    return RasterImage(clamp01(out))


def apply_noise(img: RasterImage, sigma: float, poisson: bool = False,
                seed: int = 0) -> RasterImage:
    """Optional Poisson shot noise followed by additive Gaussian noise.

    The shot-noise stage models a photon count of POISSON_SCALE per unit
    intensity. Deterministic for a fixed seed; output clamped to [0, 1].
    """
    stage = NoiseStage(sigma, poisson, seed)
    rng = np.random.default_rng(stage.seed)
    data = img.data
    if stage.poisson:
        data = rng.poisson(data * POISSON_SCALE).astype(np.float64) / POISSON_SCALE
    if stage.sigma > 0.0:
        data = data + rng.normal(0.0, stage.sigma, size=data.shape)
    return RasterImage(clamp01(data))


def degrade(img: RasterImage, recipe: DegradationRecipe) -> RasterImage:
    """Compose the present stages in the order darken -> blur -> haze -> noise."""
    out = img
    if recipe.darken is not None:
        out = apply_darken(out, recipe.darken.gain, recipe.darken.gamma)
    if recipe.blur is not None:
        out = RasterImage(clamp01(convolve2d(out, recipe.blur).data))
    if recipe.haze is not None:
        out = apply_haze(out, recipe.haze.airlight, recipe.haze.transmission)
    if recipe.noise is not None:
        out = apply_noise(out, recipe.noise.sigma, recipe.noise.poisson, recipe.noise.seed)
    return out


# ---------------------------------------------------------------------------
# Random draws for mixed-degradation synthesis
# ---------------------------------------------------------------------------

def random_blur_kernel(rng: np.random.Generator) -> tuple[Kernel2D, dict]:
    """Draw a Gaussian or motion-line PSF; returns the kernel and its spec."""
    if rng.random() < 0.5:
        sigma = float(rng.uniform(*GAUSS_SIGMA_RANGE))
        return gaussian_kernel(sigma), {"kind": "gaussian", "sigma": sigma}
    lo, hi = MOTION_LENGTH_RANGE
    length = int(rng.integers(lo, hi + 1))
    angle = float(rng.uniform(0.0, 180.0))
    return motion_kernel(length, angle), {"kind": "motion", "length": length, "angle": angle}


def random_sigma(rng: np.random.Generator, lo: float = 0.02, hi: float = SIGMA_MAX) -> float:
    if not (0.0 <= lo <= hi <= SIGMA_MAX):
        raise ValueError(f"sigma range [{lo}, {hi}] outside [0, {SIGMA_MAX}]")
    return float(rng.uniform(lo, hi))


# ---------------------------------------------------------------------------
# Recipe serialization (JSON dict and key=value text)
# ---------------------------------------------------------------------------

def kernel_from_spec(spec: dict) -> Kernel2D:
    kind = spec.get("kind")
    if kind == "gaussian":
        return gaussian_kernel(float(spec["sigma"]),
                               int(spec["radius"]) if "radius" in spec else None)
    if kind == "motion":
        return motion_kernel(int(spec["length"]), float(spec.get("angle", 0.0)))
    if kind == "taps":
        return Kernel2D(np.asarray(spec["taps"], dtype=np.float64),
                        normalized=bool(spec.get("normalized", True)))
    raise ValueError(f"unknown kernel kind {kind!r}")


def kernel_to_spec(kernel: Kernel2D) -> dict:
    return {"kind": "taps", "taps": kernel.taps.tolist(), "normalized": kernel.normalized}


def recipe_to_dict(recipe: DegradationRecipe) -> dict:
    out: dict = {}
    if recipe.darken is not None:
        out["darken"] = {"gain": recipe.darken.gain, "gamma": recipe.darken.gamma}
    if recipe.blur is not None:
        out["blur"] = kernel_to_spec(recipe.blur)
    if recipe.haze is not None:
        t = recipe.haze.transmission
        out["haze"] = {
            "airlight": list(recipe.haze.airlight),
            "transmission": t.tolist() if isinstance(t, np.ndarray) else t,
        }
    if recipe.noise is not None:
        out["noise"] = {"sigma": recipe.noise.sigma, "poisson": recipe.noise.poisson,
                        "seed": recipe.noise.seed}
    return out


def recipe_from_dict(spec: dict) -> DegradationRecipe:
    darken = blur = haze = noise = None
    if "darken" in spec:
        d = spec["darken"]
        darken = DarkenStage(float(d["gain"]), float(d["gamma"]))
    if "blur" in spec:
        blur = kernel_from_spec(spec["blur"])
    if "haze" in spec:
        h = spec["haze"]
        t = h["transmission"]
        t_val = np.asarray(t, dtype=np.float64) if isinstance(t, list) else float(t)
        a = h["airlight"]
        a_val = tuple(a) if isinstance(a, list) else (float(a),) * 3
        haze = HazeStage(a_val, t_val)
    if "noise" in spec:
        n = spec["noise"]
        noise = NoiseStage(float(n["sigma"]), bool(n.get("poisson", False)),
                           int(n.get("seed", 0)))
    return DegradationRecipe(darken, blur, haze, noise)


def recipe_to_json(recipe: DegradationRecipe) -> str:
    return json.dumps(recipe_to_dict(recipe), sort_keys=True)


def recipe_from_json(text: str) -> DegradationRecipe:
    return recipe_from_dict(json.loads(text))


def recipe_from_text(text: str) -> DegradationRecipe:
    """Parse a flat key=value config, e.g. ``darken.gain=0.5`` per line."""
    spec: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        parts = key.split(".")
        node = spec
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = json.loads(value)
    return recipe_from_dict(spec)
