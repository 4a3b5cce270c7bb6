import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import bisect

from src.services.params_service import build, config_with
from src.services.steady_state_service import (
    all_real_roots,
    cubic_coefficients,
    denominator,
    fixed_point_map,
    force_coefficient,
    solve_steady_state,
    steady_state_report,
)
from src.utils.errors import LasingThresholdError


def test_paper_point_satisfies_the_equations(paper_point):
    sys, drive = paper_point
    ss = solve_steady_state(sys, drive)
    assert ss.residual <= 1e-10
    assert ss.x_s > 0.0
    assert ss.n1 == abs(ss.a1_s) ** 2
    assert_allclose(fixed_point_map(sys, drive, ss.x_s), ss.x_s, rtol=1e-9)


def test_roots_satisfy_the_cubic_identity(paper_point):
    sys, drive = paper_point
    p = complex(-sys.kappa, drive.Delta_L)
    target = force_coefficient(sys) * drive.E_L ** 2 * abs(p) ** 2
    for r in all_real_roots(sys, drive):
        assert_allclose(r * abs(denominator(sys, drive, r)) ** 2, target, rtol=1e-9)


def test_cubic_coefficients_match_expanded_denominator(paper_point):
    sys, drive = paper_point
    poly = cubic_coefficients(sys, drive)
    x = 1e-15
    expected = x * abs(denominator(sys, drive, x)) ** 2 + poly.c0
    assert_allclose(poly(x), expected, rtol=1e-10)


def test_report_contains_the_physical_root(paper_point):
    sys, drive = paper_point
    report = steady_state_report(sys, drive)
    x_s = report.steady_state.x_s
    assert min(abs(r - x_s) for r in report.all_real_roots) <= 1e-9 * x_s


def test_zero_pump_gives_empty_resonators(config):
    sys, drive = build(config, P_L=0.0)
    ss = solve_steady_state(sys, drive)
    assert ss.x_s == 0.0
    assert ss.a1_s == 0
    assert ss.a2_s == 0


def test_displacement_grows_with_pump(config):
    xs = [solve_steady_state(*build(config, P_L=p)).x_s for p in np.geomspace(1e-9, 20e-6, 20)]
    assert all(b > a for a, b in zip(xs, xs[1:]))


@pytest.mark.parametrize("kappa_over_gamma", [-1.0, -0.5, 0.0])
def test_displacement_is_monotone_without_net_gain(config, kappa_over_gamma):
    cfg = config_with(config, kappa=kappa_over_gamma * config.system.gamma)
    xs = [solve_steady_state(*build(cfg, P_L=p)).x_s for p in np.linspace(0.0, 20e-6, 50)]
    assert xs[0] == 0.0
    assert all(b >= a for a, b in zip(xs, xs[1:]))


def _scanned_fixed_points(sys, drive, points=10**6 + 1):
    """Sign changes of x -> F(x) - x on [0, 10 F(0)], refined by bisection"""
    p = complex(-sys.kappa, drive.Delta_L)
    coefficient = force_coefficient(sys)

    def excess(x):
        D = p * (sys.gamma + 1j * (drive.Delta_L - sys.g_om * x)) + sys.J_coupling ** 2
        return coefficient * np.abs(drive.E_L * p / D) ** 2 - x

    x_guess = excess(0.0)
    grid = np.linspace(0.0, 10.0 * x_guess, points)
    values = excess(grid)
    brackets = np.nonzero(np.sign(values[:-1]) != np.sign(values[1:]))[0]
    return [bisect(excess, grid[i], grid[i + 1], xtol=1e-30, rtol=1e-14) for i in brackets]


def test_steady_state_matches_fixed_point_scan(paper_point):
    sys, drive = paper_point
    assert sys.kappa == pytest.approx(0.5 * sys.gamma)
    scanned = _scanned_fixed_points(sys, drive)
    assert len(scanned) == 1
    assert_allclose(solve_steady_state(sys, drive).x_s, scanned[0], rtol=1e-6)

    roots = all_real_roots(sys, drive)
    for x in scanned:
        assert min(abs(r - x) for r in roots) <= 1e-6 * x


def test_weak_pump_is_linear(config):
    sys, drive = build(config, P_L=1e-12)
    ss = solve_steady_state(sys, drive)
    p = complex(-sys.kappa, drive.Delta_L)
    linear = force_coefficient(sys) * abs(drive.E_L * p / denominator(sys, drive, 0.0)) ** 2
    assert_allclose(ss.x_s, linear, rtol=1e-6)


def test_random_operating_points(config):
    rng = np.random.default_rng(7)
    base = config
    gamma, omega_m = base.system.gamma, base.system.omega_m
    for _ in range(1000):
        cfg = config_with(base,
                          kappa=rng.uniform(-2.0, 2.0) * gamma,
                          J_coupling=rng.uniform(0.0, 2.0) * gamma)
        cfg = cfg.model_copy(update={"Delta_L": rng.uniform(0.5, 1.5) * omega_m})
        sys, drive = build(cfg, P_L=rng.uniform(0.1, 20.0) * 1e-6)
        ss = solve_steady_state(sys, drive)
        assert ss.residual <= 1e-10
        assert ss.x_s >= 0.0


def test_threshold_is_reported(config):
    # D(0) = -kappa gamma + J^2 on resonance
    cfg = config_with(config, kappa=config.system.gamma, J_coupling=config.system.gamma, m_eff=1e10)
    cfg = cfg.model_copy(update={"Delta_L": 0.0})
    sys, drive = build(cfg, P_L=1e-15)
    with pytest.raises(LasingThresholdError) as exc:
        solve_steady_state(sys, drive)
    assert exc.value.exit_code == 3
