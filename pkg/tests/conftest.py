import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def brute_correlate(img, weights):
    """Direct loop over pixels and kernel taps with half-sample mirror borders."""
    h, w = img.shape
    r = weights.shape[0] // 2

    def mirror(i, n):
        while i < 0 or i >= n:
            i = -i - 1 if i < 0 else 2 * n - 1 - i
        return i

    out = np.zeros_like(img)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    acc += weights[dy + r, dx + r] * img[mirror(y + dy, h), mirror(x + dx, w)]
            out[y, x] = acc
    return out


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
