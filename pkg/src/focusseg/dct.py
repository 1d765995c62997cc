"""DCT sharpness features and the per-pixel blur map.

For every pixel an ``m x m`` patch is cut out (mirror border), re-blurred
with a small Gaussian, and both versions are transformed with an orthonormal
2-D DCT-II. Coefficients are averaged along anti-diagonals (equal spatial
frequency), the ratio between original and re-blurred averages is pooled into
three frequency bands (the DCR), and the DCR is squashed into [0, 1).
Sharp patches lose a lot of energy when re-blurred and score close to 1.

The raw map can then be smoothed with a non-local weighted mean driven by
low-order DCT descriptors, and cleaned with a double threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage

from .errors import DomainError, ShapeError
from .image import (
    NDIMAGE_BORDER,
    NUMPY_BORDER,
    as_gray,
    bilateral_filter,
    gaussian_kernel_1d,
)

RATIO_EPS = 1e-8
# one 8-bit gray level; anti-diagonal averages below this are treated as noise
DEFAULT_RATIO_FLOOR = 1.0 / 255.0


@dataclass(frozen=True)
class DcrParams:
    """Band split and weights of the DCR.

    ``l`` and ``h`` are 1-based band boundaries on a vector of length
    ``n = 2m - 1``; ``None`` picks ``ceil(n/3) + 1`` and ``ceil(2n/3) + 1``.
    """

    l: int | None = None
    h: int | None = None
    a: float = 1.0
    b: float = 1.0
    y: float = 1.0
    map_b: float = 0.4
    map_base: float = math.e

    def __post_init__(self):
        if min(self.a, self.b, self.y) < 0 or self.a + self.b + self.y <= 0:
            raise DomainError("band weights must be >= 0 with a positive sum")
        if not self.map_b > 0:
            raise DomainError("map_b must be positive")
        if not self.map_base > 1:
            raise DomainError("map_base must exceed 1")

    def bands(self, n: int) -> tuple[int, int]:
        l = self.l if self.l is not None else math.ceil(n / 3) + 1
        h = self.h if self.h is not None else math.ceil(2 * n / 3) + 1
        if not (1 < l < h <= n):
            raise DomainError(f"band boundaries need 1 < l < h <= n, got l={l}, h={h}, n={n}")
        return l, h


@dataclass(frozen=True)
class RefineParams:
    min_window: int = 5
    max_window: int = 11
    f_dct: float = 10.0
    alpha_w: float = 0.5
    beta_w: float = 0.5
    descriptor_order: int = 2

    def __post_init__(self):
        for win in (self.min_window, self.max_window):
            if win < 3 or win % 2 == 0:
                raise DomainError(f"search windows must be odd and >= 3, got {win}")
        if self.min_window > self.max_window:
            raise DomainError("min_window must not exceed max_window")
        if not self.f_dct > 0:
            raise DomainError("f_dct must be positive")
        if self.alpha_w < 0 or self.beta_w < 0 or self.alpha_w + self.beta_w == 0:
            raise DomainError("alpha_w and beta_w must be >= 0 and not both zero")
        if self.descriptor_order < 1:
            raise DomainError("descriptor_order must be >= 1")


@dataclass(frozen=True)
class BlurMapConfig:
    patch: int = 8
    sigma_blr: float = 1.0
    blur_radius: int | None = None
    ratio_floor: float = DEFAULT_RATIO_FLOOR
    dcr_input: str = "ratio"  # or "vector": pool |c| instead of the ratio
    dcr: DcrParams = field(default_factory=DcrParams)
    bilateral: bool = False
    bilateral_sigma_spatial: float = 1.0
    bilateral_sigma_range: float = 0.1
    refine: bool = True
    refine_params: RefineParams = field(default_factory=RefineParams)
    threshold: bool = True
    th1: float = 0.7
    th2: float | None = None  # None -> 0.4 * th1

    def __post_init__(self):
        if self.patch < 2:
            raise DomainError("patch size must be >= 2")
        if not self.sigma_blr > 0:
            raise DomainError("sigma_blr must be positive")
        if not self.ratio_floor > 0:
            raise DomainError("ratio_floor must be positive")
        if self.dcr_input not in ("ratio", "vector"):
            raise DomainError(f"dcr_input must be 'ratio' or 'vector', got {self.dcr_input!r}")
        th2 = self.low_threshold
        if not (0.0 <= th2 <= self.th1 <= 1.0):
            raise DomainError("thresholds need 0 <= th2 <= th1 <= 1")

    @property
    def low_threshold(self) -> float:
        return 0.4 * self.th1 if self.th2 is None else self.th2


# -- transforms ---------------------------------------------------------------


@lru_cache(maxsize=None)
def dct_matrix(m: int) -> np.ndarray:
    """Orthonormal DCT-II basis ``D`` with ``dct2(P) = D @ P @ D.T``."""
    k = np.arange(m)[:, None]
    u = np.arange(m)[None, :]
    d = np.cos(np.pi * k * (2 * u + 1) / (2 * m)) * math.sqrt(2.0 / m)
    d[0] /= math.sqrt(2.0)
    d.setflags(write=False)
    return d


def _check_square(patch, m=None) -> np.ndarray:
    p = np.asarray(patch, dtype=np.float64)
    if p.ndim < 2 or p.shape[-1] != p.shape[-2]:
        raise ShapeError(f"patch must be square, got shape {p.shape}")
    if m is not None and p.shape[-1] != m:
        raise ShapeError(f"patch side {p.shape[-1]} does not match m={m}")
    return p


def dct2(patch, m: int | None = None) -> np.ndarray:
    """Orthonormal 2-D DCT-II of an ``m x m`` patch (leading batch axes allowed)."""
    p = _check_square(patch, m)
    d = dct_matrix(p.shape[-1])
    return d @ p @ d.T


def idct2(coeffs) -> np.ndarray:
    c = _check_square(coeffs)
    d = dct_matrix(c.shape[-1])
    return d.T @ c @ d


@lru_cache(maxsize=None)
def _antidiagonal_averager(m: int) -> np.ndarray:
    n = 2 * m - 1
    s = np.add.outer(np.arange(m), np.arange(m)).ravel()
    a = np.zeros((m * m, n))
    a[np.arange(m * m), s] = 1.0
    a /= a.sum(axis=0)
    a.setflags(write=False)
    return a


def freq_average(coeffs) -> np.ndarray:
    """Mean of the coefficients on each anti-diagonal, low frequency first.

    Entry ``x`` (0-based) averages every ``C[u, v]`` with ``u + v == x``;
    the result has ``2m - 1`` entries.
    """
    c = _check_square(coeffs)
    m = c.shape[-1]
    return c.reshape(c.shape[:-2] + (m * m,)) @ _antidiagonal_averager(m)


def sharpness_ratio(c, c_a, eps: float = RATIO_EPS) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    c_a = np.asarray(c_a, dtype=np.float64)
    if c.shape != c_a.shape:
        raise ShapeError(f"vector shapes differ: {c.shape} vs {c_a.shape}")
    return np.abs(c) / np.maximum(np.abs(c_a), eps)


def dcr(ratio, params: DcrParams = DcrParams()):
    """Weighted mean of the low, mid and high bands of a sharpness vector."""
    r = np.asarray(ratio, dtype=np.float64)
    n = r.shape[-1]
    l, h = params.bands(n)
    low = r[..., : l - 1].mean(axis=-1)
    mid = r[..., l - 1 : h - 1].mean(axis=-1)
    high = r[..., h - 1 :].mean(axis=-1)
    out = params.a * low + params.b * mid + params.y * high
    return float(out) if out.ndim == 0 else out


def map_dcr(value, params: DcrParams = DcrParams()):
    """Squash a DCR value into [0, 1): ``(1 - base^(-b D)) / (1 + base^(-b D))``.

    Evaluated as ``tanh(b D ln(base) / 2)``, which is the same expression
    without overflow for large ``D``.
    """
    d = np.asarray(value, dtype=np.float64)
    if np.any(np.isnan(d)) or np.any(d < 0):
        raise DomainError("DCR values must be >= 0")
    out = np.tanh(0.5 * params.map_b * math.log(params.map_base) * d)
    return float(out) if out.ndim == 0 else out


def descriptor_pairs(m: int, m_max: int) -> list[tuple[int, int]]:
    """0-based ``(x, y)`` coefficient indices with ``x + y + 1 <= m_max``, row-major."""
    if not 1 <= m_max <= 2 * m - 1:
        raise DomainError(f"m_max must lie in [1, {2 * m - 1}], got {m_max}")
    return [(x, y) for x in range(m) for y in range(m) if x + y + 1 <= m_max]


def alg1_descriptors(patch, m_max: int, m: int | None = None) -> np.ndarray:
    """Low-order DCT coefficients of a patch; ``len(result)`` is the descriptor count."""
    p = _check_square(patch, m)
    pairs = descriptor_pairs(p.shape[-1], m_max)
    c = dct2(p)
    xs, ys = zip(*pairs)
    return c[..., list(xs), list(ys)]


# -- map refinement -------------------------------------------------------------


def _window_mean(raw, descriptors, window, f_dct):
    r = window // 2
    h, w = raw.shape
    rp = np.pad(raw, r, mode=NUMPY_BORDER)
    dp = np.pad(descriptors, ((r, r), (r, r), (0, 0)), mode=NUMPY_BORDER)
    num = np.zeros_like(raw)
    den = np.zeros_like(raw)
    for dy in range(window):
        for dx in range(window):
            dj = dp[dy : dy + h, dx : dx + w]
            wgt = np.exp(-np.sum((dj - descriptors) ** 2, axis=-1) / f_dct)
            num += wgt * rp[dy : dy + h, dx : dx + w]
            den += wgt
    return num / den


def refine_map(raw, descriptors, params: RefineParams = RefineParams()) -> np.ndarray:
    """Non-local smoothing of a blur map over a small and a large search window.

    Each window gives a mean of ``raw`` weighted by
    ``exp(-||descr_j - descr_i||^2 / f_dct)``; the two are blended with
    ``alpha_w`` and ``beta_w``.
    """
    raw = np.asarray(raw, dtype=np.float64)
    d = np.asarray(descriptors, dtype=np.float64)
    if d.ndim == 2:
        d = d[..., None]
    if raw.ndim != 2 or d.shape[:2] != raw.shape:
        raise ShapeError(f"descriptor field {d.shape} does not align with map {raw.shape}")
    d_min = _window_mean(raw, d, params.min_window, params.f_dct)
    d_max = _window_mean(raw, d, params.max_window, params.f_dct)
    out = (params.alpha_w * d_min + params.beta_w * d_max) / (params.alpha_w + params.beta_w)
    return np.clip(out, 0.0, 1.0)


def double_threshold(values, th1: float, th2: float) -> np.ndarray:
    """Keep values ``>= th1`` or ``<= th2``; zero everything in between."""
    if not (0.0 <= th2 <= th1 <= 1.0):
        raise DomainError(f"need 0 <= th2 <= th1 <= 1, got th1={th1}, th2={th2}")
    v = np.asarray(values, dtype=np.float64)
    return np.where((v >= th1) | (v <= th2), v, 0.0)


# -- per-pixel pipeline -----------------------------------------------------------


@lru_cache(maxsize=None)
def reblur_operator(m: int, sigma: float, radius: int | None = None) -> np.ndarray:
    """Matrix ``B`` such that ``B @ P @ B.T`` is ``P`` re-blurred with mirror borders."""
    g = gaussian_kernel_1d(sigma, radius)
    op = ndimage.correlate1d(np.eye(m), g, axis=0, mode=NDIMAGE_BORDER)
    op.setflags(write=False)
    return op


def _patch_features(patches, cfg: BlurMapConfig):
    m = patches.shape[-1]
    d = dct_matrix(m)
    db = d @ reblur_operator(m, cfg.sigma_blr, cfg.blur_radius)
    c = freq_average(d @ patches @ d.T)
    c_a = freq_average(db @ patches @ db.T)
    if cfg.dcr_input == "ratio":
        vec = sharpness_ratio(c, c_a, cfg.ratio_floor)
    else:
        vec = np.abs(c)
    return map_dcr(dcr(vec, cfg.dcr), cfg.dcr)


def patch_sharpness(patch, cfg: BlurMapConfig = BlurMapConfig()) -> float:
    """Mapped DCR of one square patch (its side overrides ``cfg.patch``)."""
    p = _check_square(patch)
    return float(_patch_features(p, cfg))


def _patch_view(image, m):
    lo = (m - 1) // 2
    hi = m - 1 - lo
    padded = np.pad(image, ((lo, hi), (lo, hi)), mode=NUMPY_BORDER)
    return sliding_window_view(padded, (m, m))


def _chunk_rows(width, m):
    return max(1, 32768 // max(1, width * m))


def raw_blur_map(image, cfg: BlurMapConfig = BlurMapConfig()) -> np.ndarray:
    """Mapped DCR for every pixel, using the patch centred on it."""
    img = as_gray(image)
    m = cfg.patch
    if img.shape[0] < m or img.shape[1] < m:
        raise DomainError(f"image {img.shape} is smaller than the {m}x{m} patch")
    view = _patch_view(img, m)
    out = np.empty(img.shape)
    step = _chunk_rows(img.shape[1], m)
    for r0 in range(0, img.shape[0], step):
        out[r0 : r0 + step] = _patch_features(view[r0 : r0 + step], cfg)
    return out


def descriptor_field(image, m: int, m_max: int) -> np.ndarray:
    """Per-pixel low-order DCT descriptors, shape ``(H, W, count)``."""
    img = as_gray(image)
    pairs = descriptor_pairs(m, m_max)
    d = dct_matrix(m)
    rows = d[[x for x, _ in pairs]]
    cols = d[[y for _, y in pairs]]
    view = _patch_view(img, m)
    out = np.empty(img.shape + (len(pairs),))
    step = _chunk_rows(img.shape[1], m)
    for r0 in range(0, img.shape[0], step):
        p = view[r0 : r0 + step]
        # C[x, y] = D[x] @ P @ D[y]
        out[r0 : r0 + step] = np.einsum("km,...mn,kn->...k", rows, p, cols)
    return out


def blur_map(image, cfg: BlurMapConfig = BlurMapConfig()) -> np.ndarray:
    """Full blur map: raw DCR map, optional bilateral clean-up, refinement, double threshold.

    Values are in [0, 1]; higher means sharper.
    """
    img = as_gray(image)
    out = raw_blur_map(img, cfg)
    if cfg.bilateral:
        out = bilateral_filter(out, cfg.bilateral_sigma_spatial, cfg.bilateral_sigma_range)
    if cfg.refine:
        desc = descriptor_field(img, cfg.patch, cfg.refine_params.descriptor_order)
        out = refine_map(out, desc, cfg.refine_params)
    if cfg.threshold:
        out = double_threshold(out, cfg.th1, cfg.low_threshold)
    return out
