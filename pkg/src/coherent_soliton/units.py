"""Laboratory parameters and the trap-unit normalization.

Time is measured in 1/omega_x, length in l_x = sqrt(hbar/(m omega_x)),
energy in hbar*omega_x and the wavefunction in 1/sqrt(l_x).

Trap frequencies are read as angular frequencies (rad/s) by default.  The
7Li example quotes "omega_x = 20 Hz, omega_r = 800 Hz" yet reproduces
l_x = 21.22 um only when those numbers are taken in rad/s.  Pass
``frequencies_in_hz=True`` to apply the 2*pi conversion instead.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

from .errors import ConfigurationError, Quasi1DWarning

# CODATA 2018
HBAR = 1.054571817e-34  # J s
PROTON_MASS = 1.67262192369e-27  # kg

QUASI_1D_MIN_RATIO = 10.0


@dataclass(frozen=True)
class PhysicalParams:
    """Condensate and trap in SI units.

    ``scattering_length`` is signed: negative for attractive interactions.
    """

    atom_count: float
    scattering_length: float
    axial_freq: float
    radial_freq: float
    atomic_mass: float
    frequencies_in_hz: bool = False

    def __post_init__(self):
        if self.atom_count < 1:
            raise ValueError(f"atom_count must be >= 1, got {self.atom_count}")
        if self.axial_freq <= 0 or self.radial_freq <= 0:
            raise ValueError("trap frequencies must be positive")
        if self.atomic_mass <= 0:
            raise ValueError("atomic_mass must be positive")

    @property
    def omega_x(self) -> float:
        """Axial angular frequency in rad/s."""
        return 2 * math.pi * self.axial_freq if self.frequencies_in_hz else self.axial_freq

    @property
    def omega_r(self) -> float:
        return 2 * math.pi * self.radial_freq if self.frequencies_in_hz else self.radial_freq

    @property
    def quasi_1d_violated(self) -> bool:
        return self.omega_r / self.omega_x < QUASI_1D_MIN_RATIO


@dataclass(frozen=True)
class SimParams:
    """Dimensionless problem definition in trap units.

    The defaults are the repulsive single-soliton scenario (g1d = 56.55,
    mu = 10, x0 = 10) on a box of half-width 20 with 2048 points.
    """

    g1d: float = 56.55
    mu: float = 10.0
    x0: float = 10.0
    n: int = 0
    L: float = 20.0
    M: int = 2048
    dt: float = 1e-3

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ConfigurationError(f"mode index n must be a non-negative integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if int(self.M) != self.M or self.M < 16 or int(self.M) & (int(self.M) - 1):
            raise ConfigurationError(f"grid_points M must be a power of two >= 16, got {self.M}")
        object.__setattr__(self, "M", int(self.M))
        if not self.L > abs(self.x0) + 6:
            raise ConfigurationError(
                f"half-width L={self.L} must exceed |x0| + 6 = {abs(self.x0) + 6}"
            )
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")

    def with_(self, **changes) -> "SimParams":
        return replace(self, **changes)


def lithium7(attractive: bool = False, atom_count: float = 1e4) -> PhysicalParams:
    """N = 10^4 7Li atoms, |a_s| = 1.5 nm, omega_x = 20, omega_r = 800."""
    a_s = -1.5e-9 if attractive else 1.5e-9
    return PhysicalParams(
        atom_count=atom_count,
        scattering_length=a_s,
        axial_freq=20.0,
        radial_freq=800.0,
        atomic_mass=7 * PROTON_MASS,
    )


def _check(p: PhysicalParams) -> None:
    if p.omega_x <= 0 or p.omega_r <= 0 or p.atomic_mass <= 0:
        raise ValueError("frequencies and mass must be positive")
    if p.quasi_1d_violated:
        warnings.warn(
            f"omega_r/omega_x = {p.omega_r / p.omega_x:.3g} < {QUASI_1D_MIN_RATIO}; "
            "quasi-1D reduction is questionable",
            Quasi1DWarning,
            stacklevel=3,
        )


def oscillator_lengths(p: PhysicalParams) -> tuple[float, float]:
    """Return ``(l_x, l_r)`` in meters."""
    _check(p)
    l_x = math.sqrt(HBAR / (p.atomic_mass * p.omega_x))
    l_r = math.sqrt(HBAR / (p.atomic_mass * p.omega_r))
    return l_x, l_r


def interaction_strength(p: PhysicalParams) -> float:
    """Dimensionless 1D coupling 2 N omega_r a_s / (omega_x l_x)."""
    l_x, _ = oscillator_lengths(p)
    return 2 * p.atom_count * p.omega_r * p.scattering_length / (p.omega_x * l_x)


def quasienergy(n: int, mu: float) -> float:
    """Floquet quasienergy 1/2 + mu + n in units of hbar*omega_x."""
    if n < 0:
        raise ValueError(f"mode index must be non-negative, got {n}")
    return 0.5 + mu + n


def to_sim_params(p: PhysicalParams, **mode) -> SimParams:
    """Build a :class:`SimParams` whose ``g1d`` comes from ``p``.

    Remaining fields (mu, x0, n, L, M, dt) are taken from ``mode`` or the
    :class:`SimParams` defaults.
    """
    return SimParams(g1d=interaction_strength(p), **mode)
