import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.services.params_service import build, config_with, with_probe_detuning, with_probe_power
from src.services.response_service import (
    eta_approx,
    find_local_extrema,
    group_delay,
    linear_system_response,
    phase_slope,
    probe_amplitude_closed_form,
    probe_response,
    single_cavity_response,
    spectrum,
    window_width,
)
from src.services.steady_state_service import solve_steady_state
from src.services.sweep_service import detuning_ratios
from src.utils.errors import ApproximationPoleError, SteadyStateInternalError


def _spectrum(config, kappa_over_gamma, P_L=None, ratios=None):
    cfg = config_with(config, kappa=kappa_over_gamma * config.system.gamma)
    sys, drive = build(cfg, P_L=P_L)
    ratios = detuning_ratios() if ratios is None else ratios
    return spectrum(sys, drive, [r * sys.omega_m for r in ratios])


def _random_points(config, count, seed):
    rng = np.random.default_rng(seed)
    gamma = config.system.gamma
    for _ in range(count):
        cfg = config_with(config, kappa=rng.uniform(-2.0, 1.5) * gamma,
                          J_coupling=rng.uniform(0.0, 2.0) * gamma)
        sys, drive = build(cfg, P_L=rng.uniform(0.5, 20.0) * 1e-6,
                           Delta_p=rng.uniform(-2.0, 2.0) * config.system.omega_m)
        yield sys, drive, solve_steady_state(sys, drive)


def test_closed_form_agrees_with_sideband_solution(config):
    for sys, drive, ss in _random_points(config, 1000, seed=1):
        resp = probe_response(sys, drive, ss)
        assert_allclose(resp.da1_plus, probe_amplitude_closed_form(sys, drive, ss), rtol=1e-12)


def test_dense_linear_system_agrees(config):
    for sys, drive, ss in _random_points(config, 50, seed=2):
        resp = probe_response(sys, drive, ss)
        dense = linear_system_response(sys, drive, ss)
        assert_allclose(dense.da1_plus, resp.da1_plus, rtol=1e-8)
        assert_allclose(dense.da2_plus, resp.da2_plus, rtol=1e-8)
        assert_allclose(dense.t_amp, resp.t_amp, rtol=1e-8)
        assert_allclose(dense.dx_plus, resp.dx_plus, rtol=1e-6)
        assert_allclose(dense.da1_minus, resp.da1_minus, rtol=1e-6)


def test_transmission_does_not_depend_on_probe_strength(paper_point):
    sys, drive = paper_point
    drive = with_probe_detuning(drive, sys, 0.1 * sys.omega_m)
    ss = solve_steady_state(sys, drive)
    weak = probe_response(sys, drive, ss)
    strong = probe_response(sys, with_probe_power(drive, sys, 100.0 * drive.P_in), ss)
    assert_allclose(strong.eta, weak.eta, rtol=1e-10)
    assert_allclose(strong.phase, weak.phase, rtol=1e-10)
    assert_allclose(strong.da1_plus / weak.da1_plus, 10.0, rtol=1e-10)


def test_unsolved_operating_point_is_refused(paper_point):
    sys, drive = paper_point
    ss = solve_steady_state(sys, drive)
    shifted = ss.model_copy(update={"x_s": 1.01 * ss.x_s, "residual": 1e-2})
    with pytest.raises(SteadyStateInternalError, match="residual"):
        probe_response(sys, drive, shifted)


def test_uncoupled_system_reduces_to_single_resonator(config):
    cfg = config_with(config, J_coupling=0.0, kappa=-config.system.gamma)
    sys, drive = build(cfg)
    ss = solve_steady_state(sys, drive)
    for ratio in (-1.5, -0.3, 0.0, 0.002, 0.7, 1.9):
        probe = with_probe_detuning(drive, sys, ratio * sys.omega_m)
        assert_allclose(probe_response(sys, probe, ss).t_amp,
                        single_cavity_response(sys, probe, ss), rtol=1e-12)


def test_bare_resonator_on_resonance(heavy_config):
    sys, drive = build(heavy_config)
    ss = solve_steady_state(sys, drive)
    resp = probe_response(sys, drive, ss)
    assert_allclose(resp.da1_plus, drive.eps_p / sys.gamma, rtol=1e-12)
    assert_allclose(resp.t_amp, -1.0, rtol=1e-12)
    assert_allclose(resp.eta, 1.0, rtol=1e-12)


def test_heavy_mirror_gives_optical_closed_form(heavy_config):
    gamma = heavy_config.system.gamma
    cfg = config_with(heavy_config, kappa=0.5 * gamma, J_coupling=gamma)
    sys, drive = build(cfg)
    ss = solve_steady_state(sys, drive)
    for ratio in (-0.3, 0.0, 0.2):
        probe = with_probe_detuning(drive, sys, ratio * sys.omega_m)
        resp = probe_response(sys, probe, ss)
        assert_allclose(resp.da1_plus / probe.eps_p, resp.mu_plus / resp.G1, rtol=1e-9)


def test_single_point_spectrum_matches_probe_response(paper_point):
    sys, drive = paper_point
    points = spectrum(sys, drive, [0.25 * sys.omega_m])
    resp = probe_response(sys, with_probe_detuning(drive, sys, 0.25 * sys.omega_m), solve_steady_state(sys, drive))
    assert points[0].eta == resp.eta
    assert points[0].phase == resp.phase


def test_empty_grid_is_rejected(paper_point):
    sys, drive = paper_point
    with pytest.raises(ValueError):
        spectrum(sys, drive, [])
    with pytest.raises(ValueError):
        spectrum(sys, drive, [0.0, math.nan])


def test_spectrum_is_unchanged_by_repeated_evaluation(paper_point):
    sys, drive = paper_point
    grid = [r * sys.omega_m for r in detuning_ratios(0.1, 41)]
    assert spectrum(sys, drive, grid) == spectrum(sys, drive, grid)


def test_phase_is_continuous_across_the_grid(config):
    points = _spectrum(config, 1.5, ratios=detuning_ratios(0.2, 401))
    steps = np.diff([p.phase for p in points])
    assert np.all(np.abs(steps) < math.pi)


def test_passive_transparency_window(config):
    points = _spectrum(config, -1.0)
    eta = [p.eta for p in points]
    centre = len(points) // 2
    assert points[centre].Delta_p == 0.0

    maxima, minima = find_local_extrema(eta)
    assert centre in maxima
    left = max(i for i in minima if i < centre)
    right = min(i for i in minima if i > centre)
    assert abs((centre - left) - (right - centre)) <= 2
    assert eta[centre] > eta[left]
    assert eta[centre] > eta[right]
    assert eta[centre] < 1.0


@pytest.mark.parametrize("kappa_over_gamma", [1.0, 1.5])
def test_gain_turns_the_window_into_a_dip(config, kappa_over_gamma):
    points = _spectrum(config, kappa_over_gamma, ratios=detuning_ratios(0.2, 201))
    eta = [p.eta for p in points]
    centre = len(points) // 2
    maxima, minima = find_local_extrema(eta)
    assert centre in minima
    left = max(i for i in maxima if i < centre)
    right = min(i for i in maxima if i > centre)
    assert eta[left] > 1.0
    assert eta[right] > 1.0


@pytest.mark.parametrize("kappa_over_gamma, expected", [(0.2, 2.28), (0.5, 10.15)])
def test_weak_gain_transmission_on_resonance(config, kappa_over_gamma, expected):
    points = _spectrum(config, kappa_over_gamma, ratios=detuning_ratios(0.2, 201))
    centre = len(points) // 2
    assert points[centre].eta == pytest.approx(expected, rel=5e-3)
    if kappa_over_gamma == 0.5:
        maxima, _ = find_local_extrema([p.eta for p in points])
        assert centre in maxima


def test_sideband_peaks_are_highest_at_the_exceptional_point(config):
    ratios = detuning_ratios(0.2, 201)

    def peak(k):
        eta = [p.eta for p in _spectrum(config, k, ratios=ratios)]
        maxima, _ = find_local_extrema(eta)
        return max(eta[i] for i in maxima)

    at_ep = peak(1.0)
    assert at_ep > peak(0.5)
    assert at_ep > peak(1.5)


def test_passive_window_widens_with_pump(config):
    ratios = detuning_ratios(0.005, 2001)

    def width(P_L):
        points = _spectrum(config, -1.0, P_L=P_L, ratios=ratios)
        index = int(np.argmax([p.eta for p in points]))
        return window_width(points, index)

    narrow, wide = width(10e-6), width(20e-6)
    assert wide > narrow
    gamma_m = config.system.Gamma_m
    assert 0.5 * gamma_m < narrow < 2.0 * gamma_m


def test_broken_phase_peak_drops_with_pump(config):
    ratios = detuning_ratios(0.2, 201)

    def peak(P_L):
        eta = [p.eta for p in _spectrum(config, 1.5, P_L=P_L, ratios=ratios)]
        maxima, _ = find_local_extrema(eta)
        return max(eta[i] for i in maxima)

    assert peak(20e-6) < peak(10e-6)


def test_passive_delay_is_positive(config):
    cfg = config_with(config, kappa=-config.system.gamma)
    for P_L in np.geomspace(0.5e-6, 20e-6, 50):
        sys, drive = build(cfg, P_L=P_L)
        assert group_delay(sys, drive) > 0.0


def test_bare_resonator_delay(heavy_config):
    sys, drive = build(heavy_config)
    # arg t = pi + 2 atan(Delta_p / gamma)
    assert_allclose(group_delay(sys, drive), 2.0 / sys.gamma, rtol=1e-6)


@pytest.mark.parametrize("kappa_over_gamma,P_L", [(-1.0, 1e-6), (-1.0, 10e-6), (0.5, 10e-6), (1.5, 10e-6)])
def test_phase_slope_sign_matches_group_delay(config, kappa_over_gamma, P_L):
    cfg = config_with(config, kappa=kappa_over_gamma * config.system.gamma)
    sys, drive = build(cfg, P_L=P_L)
    tau = group_delay(sys, drive)
    if abs(tau) < 1e-9:
        pytest.skip("delay too close to zero for a sign comparison")
    points = spectrum(sys, drive, [-10.0, 0.0, 10.0])
    assert math.copysign(1.0, phase_slope(points, 1)) == math.copysign(1.0, tau)


def test_eta_approx_trivial_cases(config):
    cfg = config_with(config, kappa=0.0).model_copy(update={"Delta_L": 0.0})
    sys, drive = build(cfg)
    assert_allclose(eta_approx(sys, solve_steady_state(sys, drive)), 1.0, rtol=1e-14)

    cfg = config_with(config, kappa=0.5 * config.system.gamma).model_copy(update={"Delta_L": 0.0})
    sys, drive = build(cfg, P_L=0.0)
    ss = solve_steady_state(sys, drive)
    J2, kg = sys.J_coupling ** 2, sys.kappa * sys.gamma
    assert_allclose(eta_approx(sys, ss), ((J2 + kg) / (J2 - kg)) ** 2, rtol=1e-12)


def test_eta_approx_pole(config):
    cfg = config_with(config, kappa=config.system.gamma, J_coupling=config.system.gamma)
    sys, drive = build(cfg)
    ss = solve_steady_state(sys, drive)
    with pytest.raises(ApproximationPoleError):
        eta_approx(sys, ss)


@pytest.mark.parametrize("kappa_over_gamma", [0.3, 0.6, 0.9])
def test_eta_approx_tracks_full_response_at_weak_pump(config, kappa_over_gamma):
    cfg = config_with(config, kappa=kappa_over_gamma * config.system.gamma)
    cfg = cfg.model_copy(update={"Delta_L": 0.0})
    sys, drive = build(cfg, P_L=1e-10)
    ss = solve_steady_state(sys, drive)
    assert drive.xi == 0.0
    full = probe_response(sys, drive, ss).eta
    assert_allclose(eta_approx(sys, ss), full, rtol=0.05)
