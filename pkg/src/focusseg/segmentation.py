"""In-focus segmentation: blur map -> PCNN firing waves -> connected regions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import pcnn
from .dct import BlurMapConfig, blur_map
from .errors import DomainError, ShapeError
from .image import ImageStats, as_gray, gaussian_blur, stats

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class PipelineConfig:
    dct: BlurMapConfig = field(default_factory=BlurMapConfig)
    pcnn: pcnn.PcnnParams = field(default_factory=pcnn.PcnnParams)
    # minimum component size in pixels; None -> area_fraction of the image
    area_threshold: float | None = None
    area_fraction: float = 0.001
    # a firing wave is in focus while its mean stimulus stays at or above this level
    wave_level: float = 0.5

    def __post_init__(self):
        if self.area_threshold is not None and self.area_threshold < 0:
            raise DomainError("area_threshold must be >= 0")
        if self.area_fraction < 0:
            raise DomainError("area_fraction must be >= 0")
        if not 0.0 <= self.wave_level <= 1.0:
            raise DomainError("wave_level must lie in [0, 1]")

    def min_area(self, n_pixels: int) -> float:
        if self.area_threshold is not None:
            return self.area_threshold
        return self.area_fraction * n_pixels


@dataclass
class SegmentationResult:
    stats: ImageStats
    blur_map: np.ndarray
    fire: np.ndarray
    candidates: np.ndarray
    mask: np.ndarray


def compose(fg, bg, chi) -> np.ndarray:
    """Alpha composite ``chi * fg + (1 - chi) * bg``."""
    fg = as_gray(fg)
    bg = as_gray(bg)
    chi = as_gray(chi)
    if not fg.shape == bg.shape == chi.shape:
        raise ShapeError(f"shapes differ: fg {fg.shape}, bg {bg.shape}, matte {chi.shape}")
    return np.clip(chi * fg + (1.0 - chi) * bg, 0.0, 1.0)


def connected_components(binary) -> tuple[np.ndarray, int]:
    """8-connected labelling of the 1-pixels.

    Labels are numbered 1..count in the row-major order of each
    component's first pixel; background is 0.
    """
    b = np.asarray(binary).astype(bool)
    if b.ndim != 2:
        raise ShapeError(f"expected a 2-D mask, got shape {b.shape}")
    labels, count = ndimage.label(b, structure=EIGHT_CONNECTED)
    if count == 0:
        return labels.astype(np.int64), 0
    flat = labels.ravel()
    nz = np.flatnonzero(flat)
    _, first = np.unique(flat[nz], return_index=True)
    order = np.argsort(nz[first], kind="stable")
    remap = np.zeros(count + 1, dtype=np.int64)
    remap[order + 1] = np.arange(1, count + 1)
    return remap[labels], int(count)


def candidate_waves(fire, stimulus, level: float) -> int:
    """Number of leading firing waves whose mean stimulus is at least ``level``."""
    fire = np.asarray(fire)
    s = np.asarray(stimulus, dtype=np.float64)
    waves = np.unique(fire[fire > 0])
    k = 0
    for wave in waves:
        if s[fire == wave].mean() < level:
            break
        k = int(wave)
    return k


def classify_pixels(fire, cfg: PipelineConfig = PipelineConfig(), stimulus=None, waves: int | None = None) -> np.ndarray:
    """Turn a fire map into a binary in-focus mask.

    Candidates are pixels that fired within the first ``waves`` iterations;
    by default the count comes from :func:`candidate_waves` when a stimulus is
    given, else only the first wave is used. Candidate components no larger
    than the area threshold are dropped.
    """
    fire = np.asarray(fire)
    if waves is None:
        waves = candidate_waves(fire, stimulus, cfg.wave_level) if stimulus is not None else 1
    cand = (fire > 0) & (fire <= waves)
    labels, count = connected_components(cand)
    if count == 0:
        return np.zeros(fire.shape, dtype=bool)
    sizes = np.bincount(labels.ravel(), minlength=count + 1)
    keep = sizes > cfg.min_area(fire.size)
    keep[0] = False
    return keep[labels]


def segment_detailed(image, cfg: PipelineConfig = PipelineConfig(), trace=None) -> SegmentationResult:
    img = as_gray(image)
    st = stats(img)
    bmap = blur_map(img, cfg.dct)
    params = pcnn.adapt_params(bmap, cfg.pcnn)
    fire = pcnn.run(bmap, params, trace=trace)
    k = candidate_waves(fire, bmap, cfg.wave_level)
    cand = (fire > 0) & (fire <= k)
    mask = classify_pixels(fire, cfg, waves=k)
    return SegmentationResult(st, bmap, fire, cand, mask)


def segment(image, cfg: PipelineConfig = PipelineConfig(), trace=None) -> np.ndarray:
    """Binary in-focus mask (True = in focus) for a grayscale image."""
    return segment_detailed(image, cfg, trace).mask


# -- synthetic fixtures ---------------------------------------------------------


def texture(kind: str, shape, rng: np.random.Generator, cell: int = 4) -> np.ndarray:
    h, w = shape
    if kind == "noise":
        return rng.random((h, w))
    if kind == "checker":
        dy, dx = rng.integers(0, cell, size=2)
        yy, xx = np.mgrid[0:h, 0:w]
        return (((yy + dy) // cell + (xx + dx) // cell) % 2).astype(np.float64)
    raise DomainError(f"unknown texture {kind!r} (expected 'noise' or 'checker')")


def synth_fixture(size, rect, sigma: float, seed: int, kind: str = "noise"):
    """Sharp textured rectangle over a Gaussian-blurred textured background.

    ``size`` is ``(height, width)``; ``rect`` is ``(x0, y0, x1, y1)`` with
    exclusive upper corners. Returns ``(composite, matte)``.
    """
    h, w = size
    x0, y0, x1, y1 = rect
    if h < 1 or w < 1:
        raise DomainError("fixture size must be positive")
    if not (0 <= x0 < x1 <= w and 0 <= y0 < y1 <= h):
        raise DomainError(f"degenerate or out-of-bounds foreground rectangle {rect}")
    if not sigma > 0:
        raise DomainError(f"background sigma must be positive, got {sigma}")
    rng = np.random.default_rng(seed)
    fg = texture(kind, (h, w), rng)
    bg = gaussian_blur(texture(kind, (h, w), rng), sigma, max(1, math.ceil(3 * sigma)))
    chi = np.zeros((h, w))
    chi[y0:y1, x0:x1] = 1.0
    return compose(fg, bg, chi), chi
