"""restorekit: multi-degradation image synthesis, restoration cues,
a toy control network, curriculum scheduling, and quality metrics."""

from .image import (
    FormatError,
    Kernel2D,
    RasterImage,
    box_kernel,
    clamp01,
    gaussian_kernel,
    gray,
    identity_kernel,
    load_image,
    luminance,
    motion_kernel,
    save_image,
)
from .ops import convolve2d, downsample2
from .degrade import (
    DarkenStage,
    DegradationRecipe,
    HazeStage,
    NoiseStage,
    apply_darken,
    apply_haze,
    apply_noise,
    degrade,
)
from .errors import ConfigError

__version__ = "0.1.0"
