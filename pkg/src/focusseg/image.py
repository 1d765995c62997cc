"""Grayscale image plumbing: loading, PGM output, Gaussian kernels and filters.

Images are plain 2-D ``float64`` numpy arrays with intensities in [0, 1].
Every filter here uses the same half-sample mirror border (``d c b a | a b c d``),
which numpy calls ``symmetric`` and scipy.ndimage calls ``reflect``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from .errors import DomainError, FormatError, ShapeError

NDIMAGE_BORDER = "reflect"
NUMPY_BORDER = "symmetric"

LUMA = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class GaussianKernel:
    sigma: float
    radius: int
    weights: np.ndarray  # (2*radius+1, 2*radius+1), sums to 1


@dataclass(frozen=True)
class ImageStats:
    high: float
    low: float
    avg: float


def as_gray(data, *, clip: bool = False) -> np.ndarray:
    """Validate ``data`` as a grayscale image and return it as float64.

    Raises ShapeError for anything that is not a non-empty 2-D array and
    DomainError for intensities outside [0, 1] (unless ``clip`` is set).
    """
    img = np.asarray(data, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ShapeError(f"expected a non-empty 2-D image, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise DomainError("image contains non-finite values")
    if clip:
        return np.clip(img, 0.0, 1.0)
    if img.min() < 0.0 or img.max() > 1.0:
        raise DomainError("image intensities must lie in [0, 1]")
    return img


def load_gray(path) -> np.ndarray:
    """Read an 8-bit PGM or PNG file as a normalized grayscale image.

    RGB input is reduced with BT.601 luma weights in floating point before the
    division by 255, so no intermediate 8-bit rounding happens.
    """
    path = os.fspath(path)
    try:
        with Image.open(path) as im:
            im.load()
            fmt = im.format
            mode = im.mode
            if fmt not in ("PNG", "PPM"):
                raise FormatError(f"{path}: unsupported image format {fmt!r}")
            if mode in ("P", "PA"):
                im = im.convert("RGBA" if "transparency" in im.info or mode == "PA" else "RGB")
                mode = im.mode
            if mode == "1":
                im = im.convert("L")
                mode = "L"
            if mode not in ("L", "LA", "RGB", "RGBA"):
                raise FormatError(f"{path}: unsupported pixel mode {mode!r} (8-bit only)")
            arr = np.asarray(im, dtype=np.float64)
    except UnidentifiedImageError as exc:
        raise FormatError(f"{path}: not a PGM or PNG image") from exc

    if mode == "LA":
        arr = arr[..., 0]
    elif mode in ("RGB", "RGBA"):
        arr = arr[..., 0] * LUMA[0] + arr[..., 1] * LUMA[1] + arr[..., 2] * LUMA[2]
    return np.clip(arr / 255.0, 0.0, 1.0)


def to_bytes(image) -> np.ndarray:
    """Quantize a [0, 1] image to uint8 with ``round(v * 255)``."""
    img = as_gray(image, clip=True)
    return np.rint(img * 255.0).astype(np.uint8)


def save_pgm(path, image) -> None:
    """Write a binary (P5) 8-bit PGM: header ``P5\\n<w> <h>\\n255\\n`` then row-major bytes."""
    data = to_bytes(image)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def gaussian_kernel(sigma: float, radius: int | None = None) -> GaussianKernel:
    """Sampled 2-D Gaussian, renormalized to unit sum.

    ``radius`` defaults to ``ceil(3 * sigma)`` (at least 1).
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if radius is None:
        radius = max(1, math.ceil(3.0 * sigma))
    if radius < 1:
        raise DomainError(f"radius must be >= 1, got {radius}")
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    r2 = x[:, None] ** 2 + x[None, :] ** 2
    w = np.exp(-r2 / (2.0 * sigma * sigma))
    w /= w.sum()
    return GaussianKernel(float(sigma), int(radius), w)


def gaussian_kernel_1d(sigma: float, radius: int | None = None) -> np.ndarray:
    """Normalized 1-D factor of :func:`gaussian_kernel` (the 2-D kernel is its outer product)."""
    k = gaussian_kernel(sigma, radius)
    g = k.weights.sum(axis=0)
    return g / g.sum()


def convolve(image, kernel: GaussianKernel) -> np.ndarray:
    """Convolve with a (symmetric) kernel using mirror borders."""
    img = as_gray(image)
    out = ndimage.correlate(img, kernel.weights, mode=NDIMAGE_BORDER)
    return np.clip(out, img.min(), img.max())


def gaussian_blur(image, sigma: float, radius: int | None = None) -> np.ndarray:
    return convolve(image, gaussian_kernel(sigma, radius))


def bilateral_filter(image, sigma_spatial: float, sigma_range: float) -> np.ndarray:
    """Edge-preserving bilateral smoothing.

    The spatial window has radius ``ceil(2 * sigma_spatial)``; weights are
    ``exp(-d^2 / 2 sigma_spatial^2) * exp(-(I_q - I_p)^2 / 2 sigma_range^2)``.
    """
    if not sigma_spatial > 0 or not sigma_range > 0:
        raise DomainError("bilateral sigmas must be positive")
    img = as_gray(image)
    r = max(1, math.ceil(2.0 * sigma_spatial))
    h, w = img.shape
    padded = np.pad(img, r, mode=NUMPY_BORDER)
    num = np.zeros_like(img)
    den = np.zeros_like(img)
    inv_s = 1.0 / (2.0 * sigma_spatial * sigma_spatial)
    inv_r = 1.0 / (2.0 * sigma_range * sigma_range)
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            shifted = padded[r + dy : r + dy + h, r + dx : r + dx + w]
            wgt = math.exp(-(dy * dy + dx * dx) * inv_s) * np.exp(-((shifted - img) ** 2) * inv_r)
            num += wgt * shifted
            den += wgt
    return np.clip(num / den, 0.0, 1.0)


def stats(image) -> ImageStats:
    img = as_gray(image)
    return ImageStats(float(img.max()), float(img.min()), float(img.mean()))
