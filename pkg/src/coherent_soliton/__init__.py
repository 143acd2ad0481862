"""Exact coherent bright solitons of the quasi-1D GPE in an oscillating laser potential."""

from .exact import (
    ExactStateParams,
    HermiteBasis,
    amplitude,
    coherent_state,
    hermite_function,
    laser_potential,
    phase,
    total_potential,
)
from .grid import Diagnostics, Grid, WaveFunction, diagnostics, make_grid
from .solver import EvolutionMode, Trajectory, evolve, initial_state, strang_step
from .units import (
    PhysicalParams,
    SimParams,
    interaction_strength,
    lithium7,
    oscillator_lengths,
    quasienergy,
    to_sim_params,
)

__version__ = "0.1.0"
