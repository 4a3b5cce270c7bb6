import cmath
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.dto.trajectory import TrajectoryState
from src.services.params_service import build, config_with, with_probe_power
from src.services.pt_phase_service import classify
from src.services.steady_state_service import solve_steady_state
from src.services.tdsim_service import (
    ORACLE_KAPPA_RATIOS,
    demodulate,
    integrate,
    max_time_step,
    oracle_check,
    oracle_point,
)
from src.utils.errors import InstabilityError, InvalidParameterError


def _bare_demod(heavy_config, per_period, probe_ratio=0.1, scale_probe=1.0, transient=25.0, periods=200):
    """Demodulated transmission of the decoupled resonator started from its steady state"""
    sys, drive = build(heavy_config, Delta_p=probe_ratio * heavy_config.system.omega_m)
    drive = with_probe_power(drive, sys, scale_probe * drive.P_in)
    ss = solve_steady_state(sys, drive)
    period = 2.0 * math.pi / drive.xi
    dt = period / per_period
    transient_periods = int(math.ceil(transient / sys.gamma / period))
    t_end = (transient_periods + periods) * period
    initial = TrajectoryState(x=ss.x_s, a1=ss.a1_s, a2=ss.a2_s)
    trajectory = integrate(sys, drive, t_end, dt, initial, sample_after=transient_periods * period - dt)
    return sys, drive, demodulate(trajectory, sys, drive, periods=periods)


def _bare_transmission(sys, drive):
    return 1.0 - 2.0 * sys.gamma / complex(sys.gamma, -drive.Delta_p)


def test_empty_system_stays_empty(config):
    sys, drive = build(config, P_L=0.0)
    trajectory = integrate(sys, drive, 100 * max_time_step(sys, drive), max_time_step(sys, drive))
    assert len(trajectory) == 101
    assert not np.any(trajectory.x)
    assert not np.any(trajectory.a1)
    assert not np.any(trajectory.a2)


def test_resonator_filling_matches_closed_form(heavy_config):
    cfg = heavy_config.model_copy(update={"Delta_L": 0.0, "P_in": 0.0})
    sys, drive = build(cfg)
    dt = max_time_step(sys, drive)
    trajectory = integrate(sys, drive, 5.0 / sys.gamma, dt)
    t = trajectory.t[-1]
    expected = drive.E_L / sys.gamma * (1.0 - math.exp(-sys.gamma * t))
    assert_allclose(trajectory.a1[-1], expected, rtol=1e-8)
    assert not np.any(trajectory.a2)


def test_time_step_bound(paper_point):
    sys, drive = paper_point
    with pytest.raises(InvalidParameterError) as exc:
        integrate(sys, drive, 1e-6, 2.0 * max_time_step(sys, drive))
    assert exc.value.field == "dt"


def test_unstable_gain_diverges(config):
    gamma = config.system.gamma
    cfg = config_with(config, kappa=3.0 * gamma, J_coupling=gamma)
    sys, drive = build(cfg)
    with pytest.raises(InstabilityError) as exc:
        integrate(sys, drive, 40.0 / gamma, max_time_step(sys, drive))
    assert exc.value.time > 0.0


def test_demodulation_recovers_bare_transmission(heavy_config):
    sys, drive, demod = _bare_demod(heavy_config, per_period=200)
    assert_allclose(demod.t_est, _bare_transmission(sys, drive), rtol=1e-6)
    assert demod.rel_err_vs_freq_domain < 1e-6


def test_demodulated_sideband_is_linear_in_probe(heavy_config):
    _, _, weak = _bare_demod(heavy_config, per_period=50)
    _, _, strong = _bare_demod(heavy_config, per_period=50, scale_probe=4.0)
    assert_allclose(strong.da1_plus_est / weak.da1_plus_est, 2.0, rtol=1e-3)


def test_no_probe_no_sideband(heavy_config):
    cfg = heavy_config.model_copy(update={"P_in": 0.0})
    sys, drive, demod = _bare_demod(cfg, per_period=50)
    assert abs(demod.da1_plus_est) < 1e-10 * abs(solve_steady_state(sys, drive).a1_s)
    assert math.isnan(demod.eta_est)
    assert demod.rel_err_vs_freq_domain is None


def test_degenerate_probe_cannot_be_demodulated(heavy_config):
    sys, drive = build(heavy_config)
    trajectory = integrate(sys, drive, 10 * max_time_step(sys, drive), max_time_step(sys, drive))
    assert drive.xi != 0.0
    zero = drive.model_copy(update={"xi": 0.0})
    with pytest.raises(InvalidParameterError):
        demodulate(trajectory, sys, zero)


def test_broken_phase_point_diverges_in_time_domain(config):
    sys, drive = build(config_with(config, kappa=1.5 * config.system.gamma))
    assert classify(sys, drive.Delta_L).unstable

    point = oracle_point(config, 1.5, 0.5)
    assert point.status == "unstable"
    assert point.detail.startswith("Trajectory diverged")
    assert point.eta_td is None


@pytest.mark.slow
def test_stable_point_is_integrated_to_a_verdict(config):
    sys, drive = build(config_with(config, kappa=0.2 * config.system.gamma))
    assert not classify(sys, drive.Delta_L).unstable

    point = oracle_point(config, 0.2, 0.5)
    assert point.status == "pass"
    assert point.eta_td is not None


def test_oracle_skips_degenerate_probe(config):
    point = oracle_point(config, 0.5, -1.0)
    assert point.status == "skipped"
    assert "xi = 0" in point.detail


@pytest.mark.slow
def test_integrator_is_fourth_order(heavy_config):
    errors = []
    for per_period in (50, 100, 200):
        sys, drive, demod = _bare_demod(heavy_config, per_period=per_period, probe_ratio=0.5)
        errors.append(abs(demod.t_est - _bare_transmission(sys, drive)))
    for coarse, fine in zip(errors, errors[1:]):
        assert 12.0 < coarse / fine < 20.0


@pytest.mark.slow
def test_time_domain_oracle(config):
    points = oracle_check(config, jobs=4)
    assert len(points) == 15
    assert {p.status for p in points} <= {"pass", "skipped"}
    skipped = [p for p in points if p.status == "skipped"]
    assert all(p.delta_p_over_omega_m == -1.0 for p in skipped)
    assert len(skipped) == len(ORACLE_KAPPA_RATIOS)
