"""Pulse-coupled neural network with one neuron per pixel.

Each neuron receives its pixel value as feeding input, a decaying linking
input from the 3x3 neighbourhood, and fires when its modulated activity
exceeds a geometrically decaying threshold. A neuron fires at most once:
after firing its threshold is pinned to ``+inf``. Bright regions fire in
early waves and pull in similar neighbours (capture), so the iteration of
first firing segments the stimulus into waves.

Updates are synchronous: every neuron reads the state of iteration ``n``
when computing iteration ``n + 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from .errors import DomainError
from .image import NDIMAGE_BORDER, as_gray

COVERAGE = 0.93


def default_weights() -> np.ndarray:
    return np.array([[0.5, 1.0, 0.5], [1.0, 0.0, 1.0], [0.5, 1.0, 0.5]])


@dataclass(frozen=True)
class PcnnParams:
    beta: float = 0.2
    v_q: float = 1.0
    d_q: float = 0.7
    v_theta: float = 20.0
    d_theta: float = 0.2
    w: np.ndarray = field(default_factory=default_weights)
    y_e: float = 1.0
    th_m: float = 0.0
    max_iters: int = 50

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise DomainError(f"beta must lie in [0, 1), got {self.beta}")
        if not (self.v_q > 0 and self.v_theta > 0):
            raise DomainError("v_q and v_theta must be positive")
        if not (self.d_q > 0 and self.d_theta > 0):
            raise DomainError("d_q and d_theta must be positive")
        if np.shape(self.w) != (3, 3):
            raise DomainError("weight matrix must be 3x3")
        if self.max_iters < 1:
            raise DomainError("max_iters must be >= 1")


@dataclass
class PcnnState:
    f: np.ndarray
    q: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    y: np.ndarray
    fired: np.ndarray
    n: int = 0


def gray_level_floor(stimulus, coverage: float = COVERAGE) -> tuple[int, float]:
    """Highest 8-bit gray level ``g`` whose upper tail holds ``coverage`` of the pixels.

    Returns ``(g, threshold)`` where the threshold sits half a gray level below
    ``g`` so that pixels at level ``g`` itself can still exceed it.
    """
    s = as_gray(stimulus)
    levels = np.minimum(np.floor(s * 255.0 + 1e-9), 255).astype(np.int64)
    hist = np.bincount(levels.ravel(), minlength=256)
    upper = np.cumsum(hist[::-1])[::-1]
    g = int(np.nonzero(upper >= coverage * s.size)[0].max())
    return g, max(g - 0.5, 0.0) / 255.0


def adapt_params(stimulus, base: PcnnParams | None = None) -> PcnnParams:
    """Set the initial threshold to the stimulus maximum and the floor from its histogram."""
    s = as_gray(stimulus)
    _, th_m = gray_level_floor(s)
    return replace(base or PcnnParams(), y_e=float(s.max()), th_m=th_m)


def init(stimulus, params: PcnnParams) -> PcnnState:
    s = as_gray(stimulus)
    zeros = np.zeros_like(s)
    return PcnnState(
        f=s.copy(),
        q=zeros.copy(),
        u=zeros.copy(),
        theta=np.full_like(s, params.y_e),
        y=zeros.copy(),
        fired=np.zeros(s.shape, dtype=bool),
        n=0,
    )


def step(state: PcnnState, params: PcnnParams) -> PcnnState:
    """One synchronous update; returns a new state."""
    if state.n >= params.max_iters:
        raise DomainError(f"iteration cap {params.max_iters} reached")
    link = ndimage.correlate(state.y, np.asarray(params.w, dtype=np.float64), mode=NDIMAGE_BORDER)
    q = params.v_q * link + math.exp(-params.d_q) * state.q
    u = state.f * (1.0 + params.beta * q)
    decayed = params.v_theta * state.y + math.exp(-params.d_theta) * state.theta
    theta = np.where(state.fired, np.inf, np.maximum(decayed, params.th_m))
    y = (u > theta) & ~state.fired
    fired = state.fired | y
    theta = np.where(y, np.inf, theta)
    return PcnnState(state.f, q, u, theta, y.astype(np.float64), fired, state.n + 1)


def run(stimulus, params: PcnnParams | None = None, trace=None) -> np.ndarray:
    """Iterate until every neuron has fired or ``max_iters`` is reached.

    Returns the fire map: iteration of first firing per pixel, 0 if it never
    fired. ``trace`` may be a callable that receives one ``"iter <n>: <count>"``
    line per iteration.
    """
    s = as_gray(stimulus)
    if params is None:
        params = adapt_params(s)
    state = init(s, params)
    fire = np.zeros(s.shape, dtype=np.int64)
    while state.n < params.max_iters and not state.fired.all():
        state = step(state, params)
        newly = state.y > 0
        fire[newly] = state.n
        if trace is not None:
            trace(f"iter {state.n}: {int(newly.sum())}")
    return fire
