"""Exception and warning types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid grid, parameter set or scenario configuration."""


class DegenerateStateError(ValueError):
    """A wavefunction with zero norm was passed where a physical state is required."""


class UnsupportedModeError(ValueError):
    """The requested operation is not defined for this mode index."""


class TrajectoryError(ValueError):
    """A trajectory does not cover the time window an analysis needs."""


class BlowUpError(RuntimeError):
    """Non-finite values appeared during time integration.

    ``trajectory`` holds every snapshot recorded before the failure.
    """

    def __init__(self, t, trajectory=None):
        super().__init__(f"non-finite wavefunction at t = {t:.6g}")
        self.t = t
        self.trajectory = trajectory


class BoundaryLeakWarning(UserWarning):
    """Density at the edge of the periodic box is not negligible."""


class Quasi1DWarning(UserWarning):
    """Radial/axial trap ratio too small for the quasi-1D reduction."""
