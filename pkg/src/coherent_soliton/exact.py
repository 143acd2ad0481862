"""Closed-form coherent soliton family and the laser potential that sustains it.

All functions work in trap units and broadcast over numpy arrays in ``x``
and ``t``.  The n-th state is a Hermite-Gaussian packet whose center follows
x0*cos(t); the laser potential is chosen so that V_L + g1d*|psi|^2 = mu,
which reduces the GPE to the linear oscillator equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_PI_QUARTER = math.pi ** -0.25
_RESCALE = 1e150
_LOG_RESCALE = math.log(_RESCALE)


def _hermite_sequence(k_max: int, x: np.ndarray):
    """Yield h_0(x), ..., h_{k_max}(x).

    The recurrence runs on the polynomial factor with the Gaussian kept as a
    per-point log scale, so large orders and |x| neither overflow nor
    underflow prematurely.
    """
    log_scale = -0.5 * x * x
    prev = np.zeros_like(x)
    cur = np.full_like(x, _PI_QUARTER)
    yield cur * np.exp(log_scale)
    for j in range(k_max):
        prev, cur = cur, math.sqrt(2.0 / (j + 1)) * x * cur - math.sqrt(j / (j + 1)) * prev
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur[big] /= _RESCALE
            prev[big] /= _RESCALE
            log_scale[big] += _LOG_RESCALE
        yield cur * np.exp(log_scale)


def hermite_function(k: int, x):
    """Normalized Hermite function h_k(x) = H_k(x) exp(-x^2/2) / sqrt(sqrt(pi) 2^k k!)."""
    if k < 0:
        raise ValueError(f"Hermite order must be non-negative, got {k}")
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).astype(float, copy=True)
    for h in _hermite_sequence(k, flat):
        pass
    return h[0] if x.ndim == 0 else h.reshape(x.shape)


class HermiteBasis:
    """All normalized Hermite functions up to ``max_order`` at once."""

    def __init__(self, max_order: int):
        if max_order < 0:
            raise ValueError("max_order must be non-negative")
        self.max_order = max_order

    def __call__(self, x) -> np.ndarray:
        """Array of shape ``(max_order + 1, *x.shape)``."""
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).astype(float, copy=True)
        rows = list(_hermite_sequence(self.max_order, flat))
        return np.stack(rows).reshape((self.max_order + 1,) + x.shape)


@dataclass(frozen=True)
class ExactStateParams:
    n: int = 0
    x0: float = 10.0
    mu: float = 10.0
    g1d: float = 56.55

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"mode index n must be a non-negative integer, got {self.n}")

    @classmethod
    def from_sim(cls, sim) -> "ExactStateParams":
        return cls(n=sim.n, x0=sim.x0, mu=sim.mu, g1d=sim.g1d)


def packet_center(p: ExactStateParams, t):
    return p.x0 * np.cos(t)


def amplitude(p: ExactStateParams, x, t):
    """Real envelope h_n(x - x0 cos t); may be negative for odd lobes."""
    return hermite_function(p.n, np.asarray(x) - p.x0 * np.cos(t))


def phase(p: ExactStateParams, x, t):
    """Unwrapped phase -[(1/2 + mu + n) t + x0 x sin t - x0^2 sin(2t) / 4]."""
    energy = 0.5 + p.mu + p.n
    return -(energy * t + p.x0 * x * np.sin(t) - 0.25 * p.x0**2 * np.sin(2 * t))


def coherent_state(p: ExactStateParams, x, t):
    return amplitude(p, x, t) * np.exp(1j * phase(p, x, t))


def density(p: ExactStateParams, x, t):
    return amplitude(p, x, t) ** 2


def laser_potential(p: ExactStateParams, x, t):
    """Oscillating Hermite-Gaussian laser mu - g1d * h_n(x - x0 cos t)^2.

    Built from the same envelope as :func:`amplitude`, so the balance with
    the nonlinear term holds to rounding.
    """
    return p.mu - p.g1d * density(p, x, t)


def total_potential(p: ExactStateParams, x, t):
    x = np.asarray(x, dtype=float)
    return 0.5 * x * x + laser_potential(p, x, t)


def wrap_phase(theta):
    """Reduce to (-pi, pi]; for presentation only."""
    wrapped = np.angle(np.exp(1j * np.asarray(theta)))
    return np.where(wrapped == -np.pi, np.pi, wrapped)
