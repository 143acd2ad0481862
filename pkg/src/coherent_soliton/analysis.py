"""Verification of the exact soliton family and stability experiments."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import exact
from .errors import BlowUpError, TrajectoryError, UnsupportedModeError
from .grid import Diagnostics, Grid, WaveFunction, diagnostics, phase_removed_distance
from .solver import EvolutionMode, Trajectory, default_laser, evolve, grid_for, initial_state
from .units import SimParams, quasienergy

__all__ = [
    "AmplitudeNoise",
    "CenterShift",
    "Diagnostics",
    "StabilityReport",
    "balance_residual",
    "convergence_order",
    "curvature_at_center",
    "diagnostics",
    "exact_trajectory",
    "floquet_check",
    "pde_residual",
    "stability_probe",
]

StateFn = Callable[[np.ndarray, float], np.ndarray]

FLAT_TOLERANCE = 1e-9


def _exact_state_fn(params: SimParams) -> StateFn:
    p = exact.ExactStateParams.from_sim(params)
    return lambda x, t: exact.coherent_state(p, x, t)


def balance_residual(params: SimParams, t: float, state: Optional[StateFn] = None) -> float:
    """max_x |V_L + g1d |psi|^2 - mu| on the grid of ``params``.

    ``state`` replaces the closed-form psi_n, e.g. to probe a mismatched pairing.
    """
    grid = grid_for(params)
    p = exact.ExactStateParams.from_sim(params)
    psi = (state or _exact_state_fn(params))(grid.x, t)
    lhs = exact.laser_potential(p, grid.x, t) + params.g1d * np.abs(psi) ** 2
    return float(np.max(np.abs(lhs - params.mu)))


def pde_residual(params: SimParams, t: float, dt_fd: float,
                 state: Optional[StateFn] = None) -> float:
    """L2 norm of the GPE residual of a closed-form state at time ``t``.

    The time derivative is a centred difference with step ``dt_fd``; the
    Laplacian is spectral.  The potential is the exact laser of ``params``.
    """
    if not dt_fd > 0:
        raise ValueError("dt_fd must be positive")
    grid = grid_for(params)
    fn = state or _exact_state_fn(params)
    x = grid.x
    psi = fn(x, t)
    psi_t = (fn(x, t + dt_fd) - fn(x, t - dt_fd)) / (2 * dt_fd)
    laser = default_laser(params)(x, t)
    rhs = (-0.5 * grid.derivative(psi, 2)
           + (0.5 * x**2 + laser + params.g1d * np.abs(psi) ** 2) * psi)
    return grid.l2_norm(1j * psi_t - rhs)


def curvature_at_center(params: SimParams, t: float) -> tuple[str, float]:
    """Classify the total potential at the soliton center x0 cos t.

    The laser part is differentiated spectrally and interpolated to the
    center; the harmonic trap contributes exactly 1.  Its periodic extension
    has a kink at the box edge, so it is not differentiated spectrally.
    """
    if params.n != 0:
        raise UnsupportedModeError("curvature classification is defined for n = 0 only")
    grid = grid_for(params)
    p = exact.ExactStateParams.from_sim(params)
    laser = exact.laser_potential(p, grid.x, t) - params.mu
    center = float(exact.packet_center(p, t))
    curvature = 1.0 + grid.interpolate(laser, center, order=2)
    if abs(curvature) < FLAT_TOLERANCE:
        kind = "flat"
    elif curvature > 0:
        kind = "well"
    else:
        kind = "barrier"
    return kind, curvature


def exact_trajectory(params: SimParams, times, grid: Optional[Grid] = None) -> Trajectory:
    """Sample the closed form at ``times`` into a :class:`Trajectory`."""
    grid = grid or grid_for(params)
    traj = Trajectory(stride=1)
    for t in times:
        traj.append(initial_state(params, float(t), grid))
    return traj


def floquet_check(params: SimParams, trajectory: Trajectory) -> tuple[float, float]:
    """Return ``(density_error, phase_error)`` across one period 2*pi.

    The overlap <psi(t0)|psi(t0 + 2pi)> of a Floquet state with quasienergy
    E_n has phase -2 pi E_n; ``phase_error`` is the wrapped deviation.
    """
    if not trajectory.times:
        raise TrajectoryError("empty trajectory")
    t0 = trajectory.times[0]
    try:
        j = trajectory.index_of(t0 + 2 * math.pi)
    except KeyError:
        raise TrajectoryError(
            f"trajectory needs a snapshot at t0 + 2pi = {t0 + 2 * math.pi:.12g}"
        ) from None
    a, b = trajectory.states[0], trajectory.states[j]
    if a is None or b is None:
        raise TrajectoryError("trajectory was recorded without states")
    grid = a.grid
    density_error = grid.l2_norm(b.density - a.density)
    overlap = grid.inner(a.values, b.values)
    expected = -2 * math.pi * quasienergy(params.n, params.mu)
    phase_error = abs(float(exact.wrap_phase(np.angle(overlap) - expected)))
    return density_error, phase_error


def convergence_order(steps, errors) -> float:
    """Least-squares slope of log(error) against log(step)."""
    slope, _ = np.polyfit(np.log(np.asarray(steps, float)), np.log(np.asarray(errors, float)), 1)
    return float(slope)


# --- stability experiments -------------------------------------------------

@dataclass(frozen=True)
class CenterShift:
    delta: float

    kind = "center_shift"

    @property
    def magnitude(self) -> float:
        return self.delta


@dataclass(frozen=True)
class AmplitudeNoise:
    """Multiply by 1 + epsilon * eta(x), eta a smooth random field with max |eta| = 1."""

    epsilon: float
    seed: int = 0

    kind = "amplitude_noise"

    @property
    def magnitude(self) -> float:
        return self.epsilon


Perturbation = Union[CenterShift, AmplitudeNoise]


def smooth_noise(grid: Grid, seed: int, cutoff_fraction: float = 0.25) -> np.ndarray:
    """Real random field band-limited to ``cutoff_fraction`` of Nyquist."""
    rng = np.random.default_rng(seed)
    white = rng.standard_normal(grid.M)
    spec = np.fft.fft(white)
    spec[np.abs(grid.k) > cutoff_fraction * grid.k_max] = 0.0
    eta = np.fft.ifft(spec).real
    return eta / np.max(np.abs(eta))


def perturbed_state(params: SimParams, perturbation: Perturbation, grid: Grid) -> WaveFunction:
    p = exact.ExactStateParams.from_sim(params)
    if isinstance(perturbation, CenterShift):
        values = exact.coherent_state(p, grid.x - perturbation.delta, 0.0)
    elif isinstance(perturbation, AmplitudeNoise):
        eta = smooth_noise(grid, perturbation.seed)
        values = exact.coherent_state(p, grid.x, 0.0) * (1 + perturbation.epsilon * eta)
        values = values / grid.l2_norm(values)
    else:
        raise TypeError(f"unknown perturbation {perturbation!r}")
    return WaveFunction(grid, values, 0.0)


@dataclass
class StabilityReport:
    g1d: float
    perturbation: str
    magnitude: float
    seed: Optional[int]
    times: np.ndarray
    center_deviation: np.ndarray
    l2_deviation: np.ndarray
    blow_up: bool = False
    blow_up_time: Optional[float] = None
    extra: dict = field(default_factory=dict)

    @property
    def interaction(self) -> str:
        if self.g1d > 0:
            return "repulsive"
        return "attractive" if self.g1d < 0 else "free"

    @property
    def max_center_deviation(self) -> float:
        return float(np.max(self.center_deviation))

    @property
    def max_l2_deviation(self) -> float:
        return float(np.max(self.l2_deviation))

    def summary(self) -> dict:
        out = {k: v for k, v in asdict(self).items()
               if k not in ("times", "center_deviation", "l2_deviation", "extra")}
        out.update(interaction=self.interaction,
                   max_center_deviation=self.max_center_deviation,
                   max_l2_deviation=self.max_l2_deviation,
                   horizon=float(self.times[-1]))
        return out


def stability_probe(params: SimParams, perturbation: Perturbation, horizon: float,
                    dt: Optional[float] = None, stride: Optional[int] = None) -> StabilityReport:
    """Evolve a perturbed exact state under the unperturbed laser.

    Deviations are measured against the closed-form trajectory: the center
    against x0 cos t and the state in L2 with the global phase removed.  A
    numerical blow-up ends the series early and is flagged, not raised.
    """
    if horizon < 2 * math.pi - 1e-12:
        raise ValueError("horizon must cover at least one period 2*pi")
    if perturbation.magnitude < 0:
        raise ValueError("perturbation magnitude must be non-negative")
    dt = dt or params.dt
    grid = grid_for(params)
    psi0 = perturbed_state(params, perturbation, grid)
    blow_up, blow_t = False, None
    try:
        traj = evolve(psi0, horizon, dt, EvolutionMode.NONLINEAR, params,
                      stride=stride, check_edges=False)
    except BlowUpError as err:
        traj, blow_up, blow_t = err.trajectory, True, err.t

    p = exact.ExactStateParams.from_sim(params)
    times = np.asarray(traj.times)
    centers = np.array([d.center for d in traj.records])
    center_dev = np.abs(centers - p.x0 * np.cos(times))
    l2_dev = np.array([
        phase_removed_distance(grid, s.values, exact.coherent_state(p, grid.x, s.t))
        for s in traj.states
    ])
    return StabilityReport(
        g1d=params.g1d,
        perturbation=perturbation.kind,
        magnitude=perturbation.magnitude,
        seed=getattr(perturbation, "seed", None),
        times=times,
        center_deviation=center_dev,
        l2_deviation=l2_dev,
        blow_up=blow_up,
        blow_up_time=blow_t,
    )
