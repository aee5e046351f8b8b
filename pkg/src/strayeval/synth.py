"""Deterministic synthetic flare scenes with exact ground truth.

Real straylight frames come from proprietary rendering pipelines; for
desk-scale experiments this module fabricates the essential structure
instead: elliptical Gaussian glare blobs strung along the axis from a sun
position through the frame center, over a flat or speckled background.

Ground truth is derived from the noiseless flare field alone (total
contribution >= gt_threshold), before background or noise is added, so the
mask is exact by construction rather than annotated. `fragment_mask`
reproduces the annotation flaw where one flare is recorded as many thin
slivers, and `baseline_segment` is a classical threshold-plus-area
predictor so evaluation and gating can run end to end without a trained
model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .mask import BinaryMask, GrayImage
from .regions import Connectivity, label_components
from .rng import SplitMix64, stream_floats

__all__ = [
    "FlatBackground",
    "SpeckleBackground",
    "SceneConfig",
    "FlareDescriptor",
    "SynthScene",
    "Orientation",
    "generate_scene",
    "fragment_mask",
    "baseline_segment",
    "scene_config_to_dict",
    "scene_config_from_dict",
]


@dataclass(frozen=True)
class FlatBackground:
    """Constant background level."""

    level: float

    def __post_init__(self):
        if not 0.0 <= self.level <= 255.0:
            raise ValueError(f"level must be in [0, 255], got {self.level}")


@dataclass(frozen=True)
class SpeckleBackground:
    """Sparse bright speckle: each pixel gets uniform(0, level) with
    probability ``density``, otherwise 0."""

    level: float
    density: float

    def __post_init__(self):
        if not 0.0 <= self.level <= 255.0:
            raise ValueError(f"level must be in [0, 255], got {self.level}")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"density must be in [0, 1], got {self.density}")


@dataclass(frozen=True)
class SceneConfig:
    width: int = 1024
    height: int = 1024
    sun_center: tuple = (-256.0, -256.0)
    flare_count: int = 6
    flare_axis_jitter: float = 0.04
    intensity_range: tuple = (60.0, 220.0)
    background: object = FlatBackground(8.0)
    gt_threshold: float = 16.0

    def __post_init__(self):
        if self.width < 32 or self.height < 32:
            raise ValueError(
                f"dimensions must be >= 32, got {self.width}x{self.height}"
            )
        if not 0 <= self.flare_count <= 64:
            raise ValueError(f"flare_count must be in 0..64, got {self.flare_count}")
        lo, hi = self.intensity_range
        if not (0.0 <= lo <= hi <= 255.0):
            raise ValueError(f"intensity_range must satisfy 0 <= min <= max <= 255")
        if self.flare_axis_jitter < 0:
            raise ValueError("flare_axis_jitter must be >= 0")
        if self.gt_threshold <= 0:
            raise ValueError(f"gt_threshold must be > 0, got {self.gt_threshold}")
        if not isinstance(self.background, (FlatBackground, SpeckleBackground)):
            raise TypeError("background must be FlatBackground or SpeckleBackground")


@dataclass(frozen=True)
class FlareDescriptor:
    """One glare blob: peak * exp(-(u^2/(2a^2) + v^2/(2b^2))) where (u, v)
    are coordinates along/across the blob axis."""

    center: tuple  # (row, col), floats
    radii: tuple  # (along, across) in pixels
    angle: float  # axis angle in radians
    peak: float


@dataclass(frozen=True, eq=False)
class SynthScene:
    image: GrayImage
    gt: BinaryMask
    flare_descriptors: tuple
    seed: int


class Orientation(Enum):
    ROWS = "rows"
    COLS = "cols"


def _flare_field(cfg: SceneConfig, descriptors: list) -> np.ndarray:
    rows = np.arange(cfg.height, dtype=np.float64)[:, None]
    cols = np.arange(cfg.width, dtype=np.float64)[None, :]
    field = np.zeros((cfg.height, cfg.width), dtype=np.float64)
    for d in descriptors:
        dr = rows - d.center[0]
        dc = cols - d.center[1]
        cos_t, sin_t = math.cos(d.angle), math.sin(d.angle)
        u = cos_t * dc + sin_t * dr
        v = -sin_t * dc + cos_t * dr
        a, b = d.radii
        field += d.peak * np.exp(-(u * u / (2 * a * a) + v * v / (2 * b * b)))
    return field


def _render_background(cfg: SceneConfig, noise_seed: int) -> np.ndarray:
    bg = cfg.background
    if isinstance(bg, FlatBackground):
        return np.full((cfg.height, cfg.width), bg.level, dtype=np.float64)
    # One draw per pixel: u < density selects a speckle, and u/density is
    # again uniform in [0, 1), so it doubles as the brightness sample.
    u = stream_floats(noise_seed, cfg.height * cfg.width).reshape(
        cfg.height, cfg.width
    )
    out = np.zeros((cfg.height, cfg.width), dtype=np.float64)
    if bg.density > 0.0:
        hit = u < bg.density
        out[hit] = (u[hit] / bg.density) * bg.level
    return out


def generate_scene(cfg: SceneConfig, seed: int) -> SynthScene:
    """Pure function of (cfg, seed); identical inputs give identical bytes.

    Flare centers are sampled along the ray from cfg.sun_center through the
    frame center, with a perpendicular jitter of up to
    flare_axis_jitter * min(width, height) pixels. The mask is thresholded
    from the flare field before the background is added.
    """
    rng = SplitMix64(seed)
    center = ((cfg.height - 1) / 2.0, (cfg.width - 1) / 2.0)
    axis = (center[0] - cfg.sun_center[0], center[1] - cfg.sun_center[1])
    norm = math.hypot(*axis)
    if norm == 0.0:
        axis, norm = (0.0, 1.0), 1.0
    direction = (axis[0] / norm, axis[1] / norm)
    perp = (-direction[1], direction[0])
    angle0 = math.atan2(direction[0], direction[1])
    scale = min(cfg.width, cfg.height)
    jitter = cfg.flare_axis_jitter * scale

    descriptors = []
    for _ in range(cfg.flare_count):
        t = rng.uniform(0.2, 1.4)  # 1.0 is the frame center
        off = rng.uniform(-jitter, jitter)
        cr = cfg.sun_center[0] + t * axis[0] + off * perp[0]
        cc = cfg.sun_center[1] + t * axis[1] + off * perp[1]
        along = rng.uniform(0.03, 0.10) * scale
        across = along * rng.uniform(0.35, 0.8)
        angle = angle0 + rng.uniform(-0.2, 0.2)
        peak = rng.uniform(*cfg.intensity_range)
        descriptors.append(
            FlareDescriptor(
                center=(cr, cc), radii=(along, across), angle=angle, peak=peak
            )
        )

    field = _flare_field(cfg, descriptors)
    gt = BinaryMask(field >= cfg.gt_threshold)
    noise_seed = rng.next_u64()
    raw = _render_background(cfg, noise_seed) + field
    image = GrayImage(np.clip(np.floor(raw + 0.5), 0.0, 255.0).astype(np.uint8))
    return SynthScene(
        image=image, gt=gt, flare_descriptors=tuple(descriptors), seed=seed
    )


def fragment_mask(
    gt: BinaryMask,
    stripe_period: int,
    stripe_width: int,
    orientation: Orientation = Orientation.ROWS,
) -> BinaryMask:
    """Erase periodic stripes from a mask, splitting regions into slivers.

    Index lines whose (index mod stripe_period) < stripe_width are cleared;
    the output is always a subset of the input.
    """
    if stripe_period < 1:
        raise ValueError(f"stripe_period must be >= 1, got {stripe_period}")
    if not 0 <= stripe_width < stripe_period:
        raise ValueError(
            f"stripe_width must satisfy 0 <= width < period, got {stripe_width}"
        )
    bits = gt.bits.copy()
    if orientation is Orientation.ROWS:
        erase = (np.arange(gt.height) % stripe_period) < stripe_width
        bits[erase, :] = False
    else:
        erase = (np.arange(gt.width) % stripe_period) < stripe_width
        bits[:, erase] = False
    return BinaryMask(bits)


def baseline_segment(
    img: GrayImage, intensity_threshold: int, min_area: int = 1
) -> BinaryMask:
    """Classical stand-in predictor: threshold, then drop tiny regions.

    Pixels with value >= intensity_threshold are foreground; 8-connected
    regions smaller than min_area pixels are removed.
    """
    if not 0 <= intensity_threshold <= 255:
        raise ValueError(
            f"intensity_threshold must be in 0..255, got {intensity_threshold}"
        )
    if min_area < 0:
        raise ValueError(f"min_area must be >= 0, got {min_area}")
    mask = BinaryMask(img.values >= intensity_threshold)
    if min_area <= 1 or not mask.bits.any():
        return mask
    lm = label_components(mask, Connectivity.EIGHT)
    areas = np.bincount(lm.labels.ravel(), minlength=lm.region_count + 1)
    keep = areas >= min_area
    keep[0] = False
    return BinaryMask(keep[lm.labels])


def scene_config_to_dict(cfg: SceneConfig) -> dict:
    bg = cfg.background
    if isinstance(bg, FlatBackground):
        bg_dict = {"kind": "flat", "level": bg.level}
    else:
        bg_dict = {"kind": "speckle", "level": bg.level, "density": bg.density}
    return {
        "width": cfg.width,
        "height": cfg.height,
        "sun_center": [cfg.sun_center[0], cfg.sun_center[1]],
        "flare_count": cfg.flare_count,
        "flare_axis_jitter": cfg.flare_axis_jitter,
        "intensity_range": [cfg.intensity_range[0], cfg.intensity_range[1]],
        "background": bg_dict,
        "gt_threshold": cfg.gt_threshold,
    }


def scene_config_from_dict(data: dict) -> SceneConfig:
    """Inverse of scene_config_to_dict; unknown keys are rejected."""
    if not isinstance(data, dict):
        raise ValueError("scene config must be a JSON object")
    known = {
        "width",
        "height",
        "sun_center",
        "flare_count",
        "flare_axis_jitter",
        "intensity_range",
        "background",
        "gt_threshold",
    }
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown scene config keys: {sorted(unknown)}")
    kwargs = {}
    for key in ("width", "height", "flare_count"):
        if key in data:
            kwargs[key] = int(data[key])
    for key in ("flare_axis_jitter", "gt_threshold"):
        if key in data:
            kwargs[key] = float(data[key])
    if "sun_center" in data:
        r, c = data["sun_center"]
        kwargs["sun_center"] = (float(r), float(c))
    if "intensity_range" in data:
        lo, hi = data["intensity_range"]
        kwargs["intensity_range"] = (float(lo), float(hi))
    if "background" in data:
        bg = data["background"]
        kind = bg.get("kind") if isinstance(bg, dict) else None
        if kind == "flat":
            kwargs["background"] = FlatBackground(level=float(bg["level"]))
        elif kind == "speckle":
            kwargs["background"] = SpeckleBackground(
                level=float(bg["level"]), density=float(bg["density"])
            )
        else:
            raise ValueError("background.kind must be 'flat' or 'speckle'")
    return SceneConfig(**kwargs)
