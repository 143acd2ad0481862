"""Strang split-step Fourier integrator for the dimensionless 1D GPE.

    i psi_t = -psi_xx / 2 + [x^2 / 2 + V_L(x, t) + g1d |psi|^2] psi

Each step is kinetic(dt/2) -> potential(dt) -> kinetic(dt/2), with the
time-dependent potential sampled at the step midpoint.  Every sub-step is
a pointwise multiplication by a unit-modulus factor, so the discrete norm
is conserved up to rounding.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import exact
from .errors import BlowUpError
from .grid import Diagnostics, Grid, WaveFunction, diagnostics, make_grid
from .units import SimParams

log = logging.getLogger(__name__)

SNAPSHOTS_PER_PERIOD = 200

LaserFn = Callable[[np.ndarray, float], np.ndarray]


class EvolutionMode(enum.Enum):
    NONLINEAR = "nonlinear"  # x^2/2 + V_L(x,t) + g1d |psi|^2
    LINEAR = "linear"  # x^2/2 + mu


def grid_for(params: SimParams) -> Grid:
    return make_grid(params.L, params.M)


def default_laser(params: SimParams) -> LaserFn:
    """The compensating laser for the exact state selected by ``params``."""
    p = exact.ExactStateParams.from_sim(params)
    return lambda x, t: exact.laser_potential(p, x, t)


def default_stride(dt: float) -> int:
    return max(1, round(2 * math.pi / abs(dt) / SNAPSHOTS_PER_PERIOD))


class _Stepper:
    """Holds per-run caches (kinetic factor, harmonic term) for repeated steps."""

    def __init__(self, grid: Grid, mode: EvolutionMode, params: SimParams,
                 laser: Optional[LaserFn] = None):
        self.grid = grid
        self.mode = mode
        self.params = params
        if mode is EvolutionMode.NONLINEAR and laser is None:
            laser = default_laser(params)
        self.laser = laser
        self.harmonic = 0.5 * grid.x**2
        self._half_kinetic = {}

    def half_kinetic(self, dt: float) -> np.ndarray:
        factor = self._half_kinetic.get(dt)
        if factor is None:
            factor = np.exp(-0.25j * self.grid.k**2 * dt)
            self._half_kinetic[dt] = factor
        return factor

    def potential(self, values: np.ndarray, t_mid: float) -> np.ndarray:
        if self.mode is EvolutionMode.LINEAR:
            return self.harmonic + self.params.mu
        return (self.harmonic + self.laser(self.grid.x, t_mid)
                + self.params.g1d * np.abs(values) ** 2)

    def step(self, values: np.ndarray, t: float, dt: float) -> np.ndarray:
        kin = self.half_kinetic(dt)
        with np.errstate(invalid="ignore", over="ignore"):
            values = np.fft.ifft(kin * np.fft.fft(values))
            # |psi|^2 is invariant under the phase rotation, so freezing it is exact
            values = values * np.exp(-1j * self.potential(values, t + 0.5 * dt) * dt)
            values = np.fft.ifft(kin * np.fft.fft(values))
        if not np.all(np.isfinite(values)):
            raise BlowUpError(t + dt)
        return values


def strang_step(psi: WaveFunction, dt: float, mode: EvolutionMode, params: SimParams,
                laser: Optional[LaserFn] = None) -> WaveFunction:
    """Advance ``psi`` by one symmetric split step.

    A negative ``dt`` steps backward in time; the scheme is its own inverse
    under dt -> -dt.
    """
    if dt == 0:
        raise ValueError("dt must be nonzero")
    stepper = _Stepper(psi.grid, mode, params, laser)
    return WaveFunction(psi.grid, stepper.step(psi.values, psi.t, dt), psi.t + dt)


@dataclass
class Trajectory:
    stride: int
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    records: list = field(default_factory=list)

    def append(self, psi: WaveFunction, keep_state: bool = True) -> None:
        if self.times:
            step = psi.t - self.times[-1]
            first = self.times[1] - self.times[0] if len(self.times) > 1 else step
            if step == 0 or step * first < 0:
                raise ValueError("snapshot times must be strictly monotone")
        self.times.append(psi.t)
        self.states.append(psi.copy() if keep_state else None)
        self.records.append(diagnostics(psi))

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> WaveFunction:
        return self.states[-1]

    def index_of(self, t: float, tol: float = 1e-9) -> int:
        times = np.asarray(self.times)
        j = int(np.argmin(np.abs(times - t)))
        if abs(times[j] - t) > tol:
            raise KeyError(t)
        return j

    def diagnostics_table(self) -> np.ndarray:
        return np.array([d.as_row() for d in self.records])


def evolve(psi0: WaveFunction, t_end: float, dt: float, mode: EvolutionMode,
           params: SimParams, stride: Optional[int] = None,
           laser: Optional[LaserFn] = None, keep_states: bool = True,
           check_edges: bool = True) -> Trajectory:
    """Integrate from ``psi0.t`` to ``t_end`` and record every ``stride`` steps.

    The last step is shortened if ``dt`` does not divide the interval.  On
    non-finite output a :class:`BlowUpError` carrying the partial
    trajectory is raised.
    """
    span = t_end - psi0.t
    if dt == 0 or span == 0 or math.copysign(1.0, span) != math.copysign(1.0, dt):
        raise ValueError(f"cannot reach t_end={t_end} from t={psi0.t} with dt={dt}")
    if stride is None:
        stride = default_stride(dt)
    if stride < 1:
        raise ValueError("stride must be >= 1")

    n_steps = max(1, math.ceil(span / dt - 1e-9))
    stepper = _Stepper(psi0.grid, mode, params, laser)
    traj = Trajectory(stride=stride)
    traj.append(psi0, keep_states)
    values = psi0.values.copy()
    leaked = False
    t0 = psi0.t
    for i in range(n_steps):
        t = t0 + i * dt
        h = dt if i < n_steps - 1 else t_end - t
        try:
            values = stepper.step(values, t, h)
        except BlowUpError as err:
            err.trajectory = traj
            log.warning("blow-up at t=%.6g after %d steps", err.t, i)
            raise
        if (i + 1) % stride == 0 or i == n_steps - 1:
            t_new = t_end if i == n_steps - 1 else t0 + (i + 1) * dt
            snap = WaveFunction(psi0.grid, values, t_new)
            if check_edges and not leaked:
                leaked = not snap.check_edges()
            traj.append(snap, keep_states)
    return traj


def initial_state(params: SimParams, t: float = 0.0, grid: Optional[Grid] = None) -> WaveFunction:
    """Closed-form state of ``params`` sampled at time ``t``."""
    grid = grid or grid_for(params)
    p = exact.ExactStateParams.from_sim(params)
    return WaveFunction(grid, exact.coherent_state(p, grid.x, t), t)
