import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from focusseg.errors import DomainError, FormatError, ShapeError
from focusseg.image import (
    as_gray,
    bilateral_filter,
    convolve,
    gaussian_blur,
    gaussian_kernel,
    load_gray,
    save_pgm,
    stats,
)
from conftest import brute_correlate


def _write_pgm(path, w, h, data):
    path.write_bytes(f"P5\n{w} {h}\n255\n".encode() + bytes(data))


def test_load_pgm_normalizes_bytes(tmp_path):
    p = tmp_path / "a.pgm"
    _write_pgm(p, 2, 2, [0, 255, 128, 128])
    img = load_gray(p)
    np.testing.assert_allclose(img, [[0.0, 1.0], [128 / 255, 128 / 255]])
    assert abs(img[1, 0] - 0.50196) < 1e-5


def test_load_png_rgb_luma(tmp_path):
    white = tmp_path / "w.png"
    red = tmp_path / "r.png"
    Image.new("RGB", (1, 1), (255, 255, 255)).save(white)
    Image.new("RGB", (1, 1), (255, 0, 0)).save(red)
    assert load_gray(white)[0, 0] == pytest.approx(1.0, abs=1e-12)
    mpmath.mp.dps = 30
    expected = float(mpmath.mpf("0.299") * 255 / 255)
    assert load_gray(red)[0, 0] == pytest.approx(expected, abs=1e-12)


def test_load_errors(tmp_path):
    with pytest.raises(OSError):
        load_gray(tmp_path / "missing.pgm")
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"not an image at all")
    with pytest.raises(FormatError):
        load_gray(bad)
    jpg = tmp_path / "x.jpg"
    Image.new("L", (2, 2), 10).save(jpg)
    with pytest.raises(FormatError):
        load_gray(jpg)


def test_save_pgm_is_bit_exact(tmp_path):
    p = tmp_path / "o.pgm"
    save_pgm(p, np.array([[0.0, 1.0, 0.5]]))
    assert p.read_bytes() == b"P5\n3 1\n255\n" + bytes([0, 255, 128])
    assert np.array_equal(load_gray(p) * 255, [[0, 255, 128]])


def test_as_gray_validation():
    with pytest.raises(ShapeError):
        as_gray(np.zeros(3))
    with pytest.raises(ShapeError):
        as_gray(np.zeros((0, 3)))
    with pytest.raises(DomainError):
        as_gray([[1.5]])
    with pytest.raises(DomainError):
        as_gray([[np.nan]])
    assert as_gray([[1.5]], clip=True)[0, 0] == 1.0


def test_kernel_center_weight_matches_high_precision():
    mpmath.mp.dps = 40
    total = sum(mpmath.exp(-(i * i + j * j) / mpmath.mpf(2)) for i in (-1, 0, 1) for j in (-1, 0, 1))
    oracle = float(1 / total)
    k = gaussian_kernel(1.0, 1)
    assert k.weights[1, 1] == pytest.approx(oracle, abs=1e-15)
    assert abs(k.weights[1, 1] - 0.204180) < 1e-5


@pytest.mark.parametrize("sigma,radius", [(0.3, 3), (1.0, 1), (2.5, None), (4.0, 2)])
def test_kernel_normalized_symmetric_positive(sigma, radius):
    w = gaussian_kernel(sigma, radius).weights
    assert abs(w.sum() - 1.0) < 1e-12
    assert np.all(w > 0)
    np.testing.assert_array_equal(w, w[::-1, :])
    np.testing.assert_array_equal(w, w[:, ::-1])
    np.testing.assert_array_equal(w, w.T)


def test_kernel_defaults_and_errors():
    # exact centre weight is 1 / (1 + 4 e^(-1/0.18) + ...) ~= 0.98471, close to a delta
    mpmath.mp.dps = 40
    s2 = 2 * mpmath.mpf("0.3") ** 2
    total = sum(mpmath.exp(-(i * i + j * j) / s2) for i in range(-3, 4) for j in range(-3, 4))
    assert gaussian_kernel(0.3, 3).weights[3, 3] == pytest.approx(float(1 / total), abs=1e-14)
    assert gaussian_kernel(0.3, 3).weights[3, 3] > 0.98
    assert gaussian_kernel(1.0).radius == 3
    assert gaussian_kernel(0.1).radius == 1
    for bad in (0.0, -1.0):
        with pytest.raises(DomainError):
            gaussian_kernel(bad)
    with pytest.raises(DomainError):
        gaussian_kernel(1.0, 0)


def test_kernel_decreases_with_distance():
    w = gaussian_kernel(1.7, 5).weights
    r = np.hypot(*np.mgrid[-5:6, -5:6])
    order = np.argsort(r.ravel(), kind="stable")
    d, v = r.ravel()[order], w.ravel()[order]
    for i in range(1, len(d)):
        if d[i] > d[i - 1] + 1e-12:
            assert v[i] < v[i - 1]


def test_convolve_matches_brute_force(rng):
    img = rng.random((8, 8))
    k = gaussian_kernel(1.5)
    np.testing.assert_allclose(convolve(img, k), brute_correlate(img, k.weights), atol=1e-9)


def test_convolve_constant_and_near_delta(rng):
    const = np.full((6, 7), 0.5)
    np.testing.assert_allclose(gaussian_blur(const, 2.0), const, atol=1e-15)
    img = rng.random((10, 10))
    k = gaussian_kernel(0.3, 3)
    out = convolve(img, k)
    # a convex mix keeping weight w0 at the centre moves a pixel by at most (1 - w0) * range
    assert np.abs(out - img).max() <= (1 - k.weights[3, 3]) * (img.max() - img.min()) + 1e-12
    np.testing.assert_allclose(out, brute_correlate(img, k.weights), atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    sigma=st.floats(0.2, 3.0),
    a=st.floats(0.0, 1.0),
)
def test_convolve_convex_and_linear(seed, sigma, a):
    r = np.random.default_rng(seed)
    i1, i2 = r.random((9, 11)), r.random((9, 11))
    b = 1.0 - a
    k = gaussian_kernel(sigma)
    c1, c2 = convolve(i1, k), convolve(i2, k)
    assert c1.min() >= i1.min() - 1e-12 and c1.max() <= i1.max() + 1e-12
    np.testing.assert_allclose(convolve(a * i1 + b * i2, k), a * c1 + b * c2, atol=1e-9)


def _bilateral_oracle(img, ss, sr):
    h, w = img.shape
    r = math.ceil(2 * ss)
    pad = np.pad(img, r, mode="symmetric")
    out = np.zeros_like(img)
    for y in range(h):
        for x in range(w):
            num = den = 0.0
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    q = pad[y + r + dy, x + r + dx]
                    wt = math.exp(-(dy * dy + dx * dx) / (2 * ss * ss)) * math.exp(
                        -((q - img[y, x]) ** 2) / (2 * sr * sr)
                    )
                    num += wt * q
                    den += wt
            out[y, x] = num / den
    return out


def test_bilateral_matches_oracle(rng):
    img = rng.random((8, 8))
    np.testing.assert_allclose(bilateral_filter(img, 1.2, 0.2), _bilateral_oracle(img, 1.2, 0.2), atol=1e-9)


def test_bilateral_constant_and_step_edge():
    const = np.full((5, 5), 0.3)
    np.testing.assert_allclose(bilateral_filter(const, 1.0, 0.1), const, atol=1e-15)
    step_img = np.zeros((8, 8))
    step_img[:, 4:] = 1.0
    out = bilateral_filter(step_img, 1.5, 0.05)
    assert np.all(out[:, :4] < 0.5) and np.all(out[:, 4:] > 0.5)


def test_bilateral_large_range_sigma_is_gaussian(rng):
    img = rng.random((12, 12))
    ss = 1.0
    radius = math.ceil(2 * ss)
    ref = convolve(img, gaussian_kernel(ss, radius))
    np.testing.assert_allclose(bilateral_filter(img, ss, 1e6), ref, atol=1e-6)


def test_bilateral_rejects_bad_sigma():
    with pytest.raises(DomainError):
        bilateral_filter(np.zeros((3, 3)), 0.0, 0.1)
    with pytest.raises(DomainError):
        bilateral_filter(np.zeros((3, 3)), 1.0, -1.0)


def test_stats(rng):
    s = stats(np.array([[0.0, 1.0], [0.5, 0.5]]))
    assert (s.high, s.low, s.avg) == (1.0, 0.0, 0.5)
    s = stats(np.full((3, 3), 0.7))
    assert s.high == s.low == 0.7 and s.avg == pytest.approx(0.7, abs=1e-15)
    img = rng.random((16, 16))
    vals = [float(v) for v in img.ravel()]
    hi, lo, acc = vals[0], vals[0], 0.0
    for v in vals:
        hi, lo, acc = max(hi, v), min(lo, v), acc + v
    s = stats(img)
    assert s.high == hi and s.low == lo
    assert s.avg == pytest.approx(acc / len(vals), abs=1e-12)
    assert s.low <= s.avg <= s.high
