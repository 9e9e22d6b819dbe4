"""Per-task low-level restoration cues.

Each degradation task yields one primary cue (an initial restored estimate)
and one or two secondary guidance maps:

    haze  -> dark-channel dehazed image; refined transmission map
    blur  -> Wiener-deconvolved image; thresholded edge map + shock image
    dark  -> CLAHE-enhanced image; chromaticity map
    noise -> anisotropic-diffusion smoothed image; dual-coefficient edge map
"""

from __future__ import annotations

import enum
import json
import os
from dataclasses import asdict, dataclass, field

from ..errors import ConfigError
from ..image import Kernel2D, RasterImage, load_image, save_image
from . import dehaze as _dehaze
from . import enhance as _enhance
from . import pde as _pde
from .deblur import DEFAULT_WIENER_K, wiener_deconvolve
from .dehaze import (
    TransmissionMap,
    dark_channel,
    dehaze_estimate,
    estimate_atmospheric_light,
    guided_filter,
    haze_cues,
    transmission_map,
)
from .enhance import clahe, color_map
from .pde import perona_malik, pm_edge_map, shock_filter

__all__ = [
    "TaskKind", "CueParams", "CueEntry", "CueSet", "extract_cues",
    "save_cueset", "load_cueset",
    "dark_channel", "estimate_atmospheric_light", "transmission_map",
    "guided_filter", "dehaze_estimate", "haze_cues", "TransmissionMap",
    "shock_filter", "perona_malik", "pm_edge_map",
    "clahe", "color_map", "wiener_deconvolve",
]


class TaskKind(enum.Enum):
    HAZE = "haze"
    BLUR = "blur"
    DARK = "dark"
    NOISE = "noise"


# Maximum secondary cue count per task; blur carries both edge and shock maps.
_MAX_SECONDARIES = {TaskKind.HAZE: 1, TaskKind.BLUR: 2, TaskKind.DARK: 1, TaskKind.NOISE: 1}


@dataclass(frozen=True)
class CueParams:
    """Knobs for every extractor, with standard defaults."""

    omega: float = _dehaze.DEFAULT_OMEGA
    patch_radius: int = _dehaze.DEFAULT_PATCH_RADIUS
    t_floor: float = _dehaze.DEFAULT_T_FLOOR
    top_fraction: float = _dehaze.DEFAULT_TOP_FRACTION
    guided_radius: int = 30
    guided_eps: float = 1e-3
    shock_dt: float = _pde.DEFAULT_SHOCK_DT
    shock_iters: int = _pde.DEFAULT_SHOCK_ITERS
    edge_threshold: float = _pde.DEFAULT_EDGE_THRESHOLD
    pm_conduction: float = _pde.DEFAULT_PM_K
    pm_dt: float = _pde.DEFAULT_PM_DT
    pm_iters: int = _pde.DEFAULT_PM_ITERS
    pm_k_small: float = 0.05
    pm_k_large: float = 0.5
    clahe_tile: int = _enhance.DEFAULT_TILE
    clahe_clip: float = _enhance.DEFAULT_CLIP_LIMIT
    wiener_k: float = DEFAULT_WIENER_K


@dataclass(frozen=True)
class CueEntry:
    primary: RasterImage
    secondaries: tuple[RasterImage, ...]


@dataclass(frozen=True)
class CueSet:
    entries: dict[TaskKind, CueEntry] = field(default_factory=dict)

    def __post_init__(self):
        dims = None
        for task, entry in self.entries.items():
            if len(entry.secondaries) > _MAX_SECONDARIES[task]:
                raise ValueError(
                    f"{task.value} allows at most {_MAX_SECONDARIES[task]} secondaries"
                )
            for img in (entry.primary, *entry.secondaries):
                if dims is None:
                    dims = (img.height, img.width)
                elif (img.height, img.width) != dims:
                    raise ValueError("all cue images must share the source dimensions")

    def __getitem__(self, task: TaskKind) -> CueEntry:
        return self.entries[task]

    def tasks(self) -> tuple[TaskKind, ...]:
        return tuple(self.entries.keys())

    @property
    def primary_count(self) -> int:
        return len(self.entries)

    @property
    def secondary_count(self) -> int:
        return sum(len(e.secondaries) for e in self.entries.values())


def extract_cues(img: RasterImage, tasks, params: CueParams | None = None,
                 psf: Kernel2D | None = None) -> CueSet:
    """Extract primary and secondary cues for the requested tasks."""
    tasks = list(tasks)
    if not tasks:
        raise ValueError("at least one task is required")
    params = params or CueParams()
    if TaskKind.BLUR in tasks and psf is None:
        raise ConfigError("blur cues need a PSF; none was provided")
    entries: dict[TaskKind, CueEntry] = {}
    for task in tasks:
        if task is TaskKind.HAZE:
            primary, t_img = haze_cues(
                img, params.omega, params.patch_radius, params.t_floor,
                params.top_fraction, params.guided_radius, params.guided_eps,
            )
            entries[task] = CueEntry(primary, (t_img,))
        elif task is TaskKind.BLUR:
            primary = wiener_deconvolve(img, psf, params.wiener_k)
            edge_map, shock_image = shock_filter(
                img, params.shock_dt, params.shock_iters, params.edge_threshold
            )
            entries[task] = CueEntry(primary, (edge_map, shock_image))
        elif task is TaskKind.DARK:
            primary = clahe(img, params.clahe_tile, params.clahe_clip)
            entries[task] = CueEntry(primary, (color_map(img),))
        elif task is TaskKind.NOISE:
            primary = perona_malik(img, params.pm_conduction, params.pm_dt, params.pm_iters)
            secondary = pm_edge_map(img, params.pm_k_small, params.pm_k_large,
                                    params.pm_dt, params.pm_iters)
            entries[task] = CueEntry(primary, (secondary,))
        else:
            raise ValueError(f"unknown task {task!r}")
    return CueSet(entries)


def save_cueset(cueset: CueSet, outdir: str | os.PathLike,
                params: CueParams | None = None, stem: str = "cue") -> str:
    """Write every cue as a PNG plus a manifest naming each entry."""
    outdir = os.fspath(outdir)
    os.makedirs(outdir, exist_ok=True)
    manifest: dict = {"params": asdict(params) if params else None, "tasks": {}}
    for task, entry in cueset.entries.items():
        names = {"primary": f"{stem}_{task.value}_primary.png", "secondaries": []}
        save_image(entry.primary, os.path.join(outdir, names["primary"]), bit_depth=16)
        for i, sec in enumerate(entry.secondaries):
            name = f"{stem}_{task.value}_secondary{i}.png"
            save_image(sec, os.path.join(outdir, name), bit_depth=16)
            names["secondaries"].append(name)
        manifest["tasks"][task.value] = names
    path = os.path.join(outdir, f"{stem}_manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return path


def load_cueset(manifest_path: str | os.PathLike) -> CueSet:
    manifest_path = os.fspath(manifest_path)
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    base = os.path.dirname(manifest_path)
    entries: dict[TaskKind, CueEntry] = {}
    for name, files in manifest["tasks"].items():
        primary = load_image(os.path.join(base, files["primary"]))
        secondaries = tuple(load_image(os.path.join(base, f)) for f in files["secondaries"])
        entries[TaskKind(name)] = CueEntry(primary, secondaries)
    return CueSet(entries)
