"""Uniform periodic mesh, sampled wavefunctions and their quadrature moments."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryLeakWarning, ConfigurationError, DegenerateStateError

EDGE_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class Grid:
    """Nodes x_j = -L + j*dx, j = 0..M-1, with FFT-ordered wavenumbers."""

    L: float
    M: int
    x: np.ndarray = field(init=False, repr=False)
    k: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.L > 0:
            raise ConfigurationError(f"half-width must be positive, got {self.L}")
        if int(self.M) != self.M or self.M < 16 or int(self.M) & (int(self.M) - 1):
            raise ConfigurationError(f"point count must be a power of two >= 16, got {self.M}")
        object.__setattr__(self, "M", int(self.M))
        x = -self.L + np.arange(self.M) * self.dx
        k = 2 * np.pi * np.fft.fftfreq(self.M, d=self.dx)
        x.flags.writeable = False
        k.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "k", k)

    @property
    def dx(self) -> float:
        return 2 * self.L / self.M

    @property
    def k_max(self) -> float:
        """Nyquist wavenumber pi/dx."""
        return math.pi / self.dx

    def integrate(self, values) -> complex | float:
        return np.sum(values) * self.dx

    def inner(self, a, b) -> complex:
        """<a|b> = integral of conj(a) * b."""
        return np.vdot(a, b) * self.dx

    def l2_norm(self, values) -> float:
        return math.sqrt(float(np.sum(np.abs(values) ** 2)) * self.dx)

    def derivative(self, values, order: int = 1) -> np.ndarray:
        """Spectral derivative of a periodic sample."""
        spec = np.fft.fft(values) * (1j * self.k) ** order
        out = np.fft.ifft(spec)
        return out.real if np.isrealobj(values) else out

    def interpolate(self, values, x: float, order: int = 0) -> float:
        """Evaluate the trigonometric interpolant (or its derivative) at ``x``."""
        coeffs = np.fft.fft(values) / self.M
        k = self.k.copy()
        # Nyquist mode is ambiguous; it is negligible for resolved fields
        k[self.M // 2] = 0.0
        terms = coeffs * (1j * k) ** order * np.exp(1j * k * (x + self.L))
        total = np.sum(terms)
        return float(total.real) if np.isrealobj(values) else complex(total)


def make_grid(L: float, M: int) -> Grid:
    return Grid(L, M)


@dataclass
class WaveFunction:
    grid: Grid
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.M,):
            raise ConfigurationError(
                f"expected {self.grid.M} samples, got shape {self.values.shape}"
            )

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.values.copy(), self.t)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def edges_ok(self, tol: float = EDGE_TOLERANCE) -> bool:
        peak = np.max(np.abs(self.values))
        edge = max(abs(self.values[0]), abs(self.values[-1]))
        return bool(edge < tol * peak)

    def check_edges(self, tol: float = EDGE_TOLERANCE) -> bool:
        ok = self.edges_ok(tol)
        if not ok:
            warnings.warn(
                f"edge amplitude above {tol:g} of peak at t = {self.t:.6g}; "
                "periodic images may interfere",
                BoundaryLeakWarning,
                stacklevel=2,
            )
        return ok


@dataclass(frozen=True)
class Diagnostics:
    t: float
    norm: float
    center: float
    width: float
    peak_position: float

    def as_row(self) -> list[float]:
        return [self.t, self.norm, self.center, self.width, self.peak_position]

    FIELDS = ("t", "norm", "center", "width", "peak_position")


def peak_position(grid: Grid, dens: np.ndarray) -> float:
    """Grid argmax refined by a three-point parabola."""
    j = int(np.argmax(dens))
    left, mid, right = dens[j - 1], dens[j], dens[(j + 1) % grid.M]
    curvature = left - 2 * mid + right
    offset = 0.0 if curvature == 0 else 0.5 * (left - right) / curvature
    return float(grid.x[j] + offset * grid.dx)


def diagnostics(psi: WaveFunction) -> Diagnostics:
    g = psi.grid
    dens = psi.density
    norm = float(np.sum(dens) * g.dx)
    if not norm > 0:
        raise DegenerateStateError(f"zero-norm state at t = {psi.t}")
    center = float(np.sum(g.x * dens) * g.dx / norm)
    second = float(np.sum(g.x**2 * dens) * g.dx / norm)
    width = math.sqrt(max(second - center**2, 0.0))
    return Diagnostics(psi.t, norm, center, width, peak_position(g, dens))


def phase_removed_distance(grid: Grid, a, b) -> float:
    """||a - e^{i theta} b|| with theta = arg<b|a>."""
    overlap = grid.inner(b, a)
    theta = np.angle(overlap) if overlap != 0 else 0.0
    return grid.l2_norm(a - np.exp(1j * theta) * b)
