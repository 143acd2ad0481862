import math

import numpy as np
import pytest

from coherent_soliton import analysis, exact
from coherent_soliton.analysis import AmplitudeNoise, CenterShift
from coherent_soliton.errors import DegenerateStateError, TrajectoryError, UnsupportedModeError
from coherent_soliton.grid import WaveFunction, diagnostics, make_grid
from coherent_soliton.solver import EvolutionMode, evolve, initial_state
from coherent_soliton.units import SimParams

G = 56.55
SQRT_PI = math.sqrt(math.pi)


@pytest.fixture
def paper():
    return SimParams(g1d=G, mu=10.0, x0=10.0, n=0)


@pytest.fixture
def coarse():
    return SimParams(g1d=G, mu=10.0, x0=10.0, n=0, M=512)


# --- diagnostics ------------------------------------------------------------

def test_gaussian_moments(paper):
    d = diagnostics(initial_state(paper))
    assert d.norm == pytest.approx(1.0, abs=1e-12)
    assert d.center == pytest.approx(10.0, abs=1e-10)
    assert d.width == pytest.approx(1 / math.sqrt(2), abs=1e-10)
    assert d.peak_position == pytest.approx(10.0, abs=1e-4)


@pytest.mark.parametrize("t", [0.0, 0.8, 2.0, 4.4])
def test_double_hump_center(paper, t):
    d = diagnostics(initial_state(paper.with_(n=1), t))
    assert d.center == pytest.approx(10 * math.cos(t), abs=1e-9)


def test_quarter_period_at_origin(paper):
    d = diagnostics(initial_state(paper, math.pi / 2))
    assert d.center == pytest.approx(0.0, abs=1e-9)
    assert d.peak_position == pytest.approx(0.0, abs=1e-4)


def test_peak_refinement_beats_grid_spacing():
    grid = make_grid(20, 256)
    x_peak = 0.3 * grid.dx + 1.234
    psi = WaveFunction(grid, np.exp(-(grid.x - x_peak) ** 2 / 2))
    assert abs(diagnostics(psi).peak_position - x_peak) < 0.05 * grid.dx


def test_zero_state_is_degenerate():
    with pytest.raises(DegenerateStateError):
        diagnostics(WaveFunction(make_grid(1, 16), np.zeros(16)))


def test_center_tracks_cosine_at_32_times(paper):
    for t in np.linspace(0, 2 * math.pi, 32):
        assert diagnostics(initial_state(paper, t)).center == pytest.approx(10 * math.cos(t), abs=1e-9)


# --- balance residual -------------------------------------------------------

@pytest.mark.parametrize("n", range(11))
def test_balance_exact_pairing(paper, n):
    params = paper.with_(n=n, x0=0.0 if n > 6 else 10.0)
    for t in np.arange(9) * math.pi / 4:
        assert analysis.balance_residual(params, t) < 1e-12


def test_balance_without_interaction(paper):
    assert analysis.balance_residual(paper.with_(g1d=0.0), 1.1) == 0.0


def test_balance_detects_shifted_state(paper):
    p = exact.ExactStateParams.from_sim(paper)
    shifted = lambda x, t: exact.coherent_state(p, x - 0.1, t)  # noqa: E731
    residual = analysis.balance_residual(paper, 0.0, state=shifted)
    # g * max_u |exp(-u^2) - exp(-(u - 0.1)^2)| / sqrt(pi), maximized on a 1e-5 mesh
    assert residual == pytest.approx(2.7321330637516903, rel=1e-3)
    assert residual > 0.1


# --- PDE residual -----------------------------------------------------------

@pytest.mark.parametrize("n", [0, 1])
def test_pde_residual_second_order(paper, n):
    params = paper.with_(n=n)
    steps = [1e-3, 5e-4, 2.5e-4, 1.25e-4]
    res = [analysis.pde_residual(params, 0.7, h) for h in steps]
    assert analysis.convergence_order(steps, res) == pytest.approx(2.0, abs=0.1)


@pytest.mark.parametrize("n", [0, 1])
def test_pde_residual_small_for_stationary_state(paper, n):
    params = paper.with_(n=n, x0=0.0)
    assert analysis.pde_residual(params, 0.5, 1e-4) < 1e-5


def test_pde_residual_detects_denormalized_state(paper):
    p = exact.ExactStateParams.from_sim(paper)
    scaled = lambda x, t: 1.1 * exact.coherent_state(p, x, t)  # noqa: E731
    residual = analysis.pde_residual(paper, 0.3, 1e-4, state=scaled)
    # leftover nonlinearity g (1.1^3 - 1.1) |psi|^2 psi; ||h_0^3|| = (pi sqrt 3)^(-1/2)
    expected = (1.1**3 - 1.1) * G / math.sqrt(math.pi * math.sqrt(3))
    assert residual == pytest.approx(expected, rel=1e-3)


def test_pde_residual_rejects_bad_step(paper):
    with pytest.raises(ValueError):
        analysis.pde_residual(paper, 0.0, 0.0)


# --- curvature --------------------------------------------------------------

def test_repulsive_center_is_well_at_all_times(paper):
    for t in np.linspace(0, 2 * math.pi, 32):
        kind, curv = analysis.curvature_at_center(paper, t)
        assert kind == "well"
        assert curv == pytest.approx(1 + 2 * G / SQRT_PI, rel=1e-10)
    assert curv == pytest.approx(64.81, abs=5e-3)


def test_attractive_center_is_barrier(paper):
    kind, curv = analysis.curvature_at_center(paper.with_(g1d=-G), math.pi / 2)
    assert kind == "barrier"
    assert curv == pytest.approx(-62.81, abs=5e-3)


def test_bare_trap_curvature(paper):
    assert analysis.curvature_at_center(paper.with_(g1d=0.0), 0.3) == ("well", 1.0)


def test_flat_when_laser_cancels_trap(paper):
    kind, curv = analysis.curvature_at_center(paper.with_(g1d=-SQRT_PI / 2), 1.0)
    assert kind == "flat"
    assert abs(curv) < 1e-9


def test_curvature_needs_single_soliton(paper):
    with pytest.raises(UnsupportedModeError):
        analysis.curvature_at_center(paper.with_(n=1), 0.0)


def test_curvature_matches_finite_difference_oracle(paper):
    p = exact.ExactStateParams.from_sim(paper.with_(g1d=-G))
    t, h = 0.4, 1e-3
    xc = 10 * math.cos(t)
    fd = (exact.total_potential(p, xc + h, t) - 2 * exact.total_potential(p, xc, t)
          + exact.total_potential(p, xc - h, t)) / h**2
    _, curv = analysis.curvature_at_center(paper.with_(g1d=-G), t)
    assert curv == pytest.approx(fd, rel=1e-5)


# --- Floquet ----------------------------------------------------------------

@pytest.mark.parametrize("n", range(6))
@pytest.mark.parametrize("mu", [0.0, 10.0])
def test_exact_trajectory_is_floquet(paper, n, mu):
    params = paper.with_(n=n, mu=mu)
    traj = analysis.exact_trajectory(params, [0.0, 1.0, 2 * math.pi])
    dens_err, phase_err = analysis.floquet_check(params, traj)
    assert dens_err < 1e-12
    assert phase_err < 1e-12


def test_half_integer_quasienergy_flips_sign(paper):
    traj = analysis.exact_trajectory(paper, [0.0, 2 * math.pi])
    a, b = traj.states
    overlap = a.grid.inner(a.values, b.values)
    assert overlap == pytest.approx(-1.0, abs=1e-12)


def test_numerical_floquet_converges(coarse):
    errors = []
    for dt in (2e-3, 1e-3):
        traj = evolve(initial_state(coarse), 2 * math.pi, dt, EvolutionMode.NONLINEAR, coarse)
        errors.append(analysis.floquet_check(coarse, traj))
    (d2, p2), (d1, p1) = errors
    assert p2 / p1 == pytest.approx(4.0, rel=0.05)
    assert d1 < 1e-7
    # Richardson estimate of the remaining phase defect at dt = 1e-3
    assert p1 < 2e-5


def test_floquet_needs_full_period(coarse):
    traj = analysis.exact_trajectory(coarse, [0.0, 1.0, 3.0])
    with pytest.raises(TrajectoryError):
        analysis.floquet_check(coarse, traj)


def test_floquet_needs_states(coarse):
    traj = evolve(initial_state(coarse), 2 * math.pi, 4e-3, EvolutionMode.LINEAR, coarse,
                  keep_states=False)
    with pytest.raises(TrajectoryError):
        analysis.floquet_check(coarse, traj)


# --- stability probes -------------------------------------------------------

def test_convergence_order_of_exact_power_law():
    steps = [1e-3, 5e-4, 2.5e-4]
    assert analysis.convergence_order(steps, [3 * h**2 for h in steps]) == pytest.approx(2.0)


def test_repulsive_shift_stays_bounded(coarse):
    r = analysis.stability_probe(coarse, CenterShift(0.1), 4 * math.pi, dt=2e-3)
    half = len(r.times) // 2
    assert not r.blow_up
    assert r.max_center_deviation <= 0.1 + 1e-9
    # no secular growth from the first to the second period
    assert r.center_deviation[half:].max() <= r.center_deviation[:half].max()
    assert r.interaction == "repulsive"


def test_attractive_deviates_more(coarse):
    rep = analysis.stability_probe(coarse, CenterShift(0.1), 4 * math.pi, dt=2e-3)
    att = analysis.stability_probe(coarse.with_(g1d=-G), CenterShift(0.1), 4 * math.pi, dt=2e-3)
    assert att.interaction == "attractive"
    assert att.max_center_deviation > rep.max_center_deviation


def test_unperturbed_repulsive_probe(coarse):
    r = analysis.stability_probe(coarse, CenterShift(0.0), 2 * math.pi, dt=2e-3)
    assert r.max_center_deviation < 1e-5
    assert r.max_l2_deviation < 1e-4


def test_noise_perturbation_reproducible(coarse):
    a = analysis.stability_probe(coarse, AmplitudeNoise(0.05, seed=3), 2 * math.pi, dt=4e-3)
    b = analysis.stability_probe(coarse, AmplitudeNoise(0.05, seed=3), 2 * math.pi, dt=4e-3)
    assert np.array_equal(a.center_deviation, b.center_deviation)
    assert a.seed == 3 and a.perturbation == "amplitude_noise"
    assert a.l2_deviation[0] > 0


def test_smooth_noise_is_band_limited():
    grid = make_grid(20, 512)
    eta = analysis.smooth_noise(grid, seed=11)
    assert np.max(np.abs(eta)) == pytest.approx(1.0)
    spec = np.abs(np.fft.fft(eta))
    assert np.all(spec[np.abs(grid.k) > 0.25 * grid.k_max] < 1e-10)


def test_noisy_state_is_normalized(coarse):
    grid = make_grid(coarse.L, coarse.M)
    psi = analysis.perturbed_state(coarse, AmplitudeNoise(0.2, seed=1), grid)
    assert grid.l2_norm(psi.values) == pytest.approx(1.0, abs=1e-13)


def test_probe_preconditions(coarse):
    with pytest.raises(ValueError):
        analysis.stability_probe(coarse, CenterShift(0.1), math.pi)
    with pytest.raises(ValueError):
        analysis.stability_probe(coarse, CenterShift(-0.1), 2 * math.pi)


def test_report_summary_fields(coarse):
    r = analysis.stability_probe(coarse, CenterShift(0.1), 2 * math.pi, dt=4e-3)
    s = r.summary()
    assert s["interaction"] == "repulsive"
    assert s["horizon"] == pytest.approx(2 * math.pi)
    assert np.all(np.diff(r.times) > 0)
    assert np.all(r.center_deviation >= 0) and np.all(r.l2_deviation >= 0)
