import math

import numpy as np
import pytest

from ns1d.core import ConfigError, Params, State, face_density, make_grid
from ns1d.solver import (
    InitialProfile,
    IntegrationError,
    RunSinks,
    build_initial_data,
    cfl_dt,
    run,
    step,
)


def bump_profile(**kw):
    kw.setdefault("kind", "compact_bump")
    return InitialProfile(**kw)


def test_profile_validation():
    with pytest.raises(ConfigError):
        InitialProfile(kind="nope")
    with pytest.raises(ConfigError):
        InitialProfile(smoothness_order=1)
    with pytest.raises(ConfigError):
        InitialProfile(velocity_kind="vortex")


def test_initial_data_total_vacuum():
    params = Params(n_cells=64, half_width=5.0)
    grid = params.grid()
    state, report = build_initial_data(bump_profile(amplitude=0.0), grid, params)
    assert np.all(state.rho == 0.0)
    assert np.all(state.u == 0.0)
    assert report.weighted_l2 == 0.0
    assert report.max_residual == 0.0
    assert report.g_values.size == 0


def test_initial_data_zero_velocity_residual_is_pressure_gradient():
    # with u0 = 0 the viscous part vanishes, so sqrt(rho)*g = -(rho^gamma)_x
    params = Params(n_cells=256, half_width=10.0)
    grid = params.grid()
    state, report = build_initial_data(bump_profile(), grid, params)
    p = state.rho**params.gamma
    grad_p = np.zeros(grid.n_cells + 1)
    grad_p[1:-1] = (p[1:] - p[:-1]) / grid.dx
    rf = face_density(state.rho)
    live = rf > params.rho_floor
    expected = -grad_p[live] / np.sqrt(rf[live])
    assert np.allclose(report.g_values, expected, rtol=0.0, atol=1e-14)
    assert math.isfinite(report.weighted_l2)


def test_initial_data_weighted_norm_refinement():
    # quadrature oracle: the weighted norm at N=1024 agrees with N=8192
    vals = {}
    for n in (1024, 8192):
        params = Params(n_cells=n, half_width=10.0)
        _, report = build_initial_data(bump_profile(), params.grid(), params)
        vals[n] = report.weighted_l2
    assert abs(vals[1024] - vals[8192]) <= 1e-3 * abs(vals[8192])


def test_cfl_dt_uniform_state_value():
    # rho = 1, u = 0, gamma = 2, beta = 1, dx = 0.01 -> dt = 1.25e-5
    params = Params(
        gamma=2.0, beta=1.0, half_width=0.64, n_cells=128, cfl_adv=0.4, cfl_visc=0.25
    )
    grid = params.grid()
    assert grid.dx == pytest.approx(0.01)
    state = State(t=0.0, rho=np.ones(128), u=np.zeros(129))
    dt = cfl_dt(state, grid, params)
    assert dt == pytest.approx(1.25e-5, rel=1e-12)


def test_cfl_dt_vacuum_floor():
    # total vacuum: sound speed vanishes, the viscous term with the floor rules
    params = Params(half_width=0.64, n_cells=128)
    grid = params.grid()
    state = State(t=0.0, rho=np.zeros(128), u=np.zeros(129))
    dt = cfl_dt(state, grid, params)
    expected = params.cfl_visc * grid.dx**2 * params.rho_floor
    assert dt == pytest.approx(expected, rel=1e-12)


def test_cfl_dt_viscous_dx_scaling():
    state_of = lambda n: State(t=0.0, rho=np.ones(n), u=np.zeros(n + 1))
    p1 = Params(half_width=0.64, n_cells=128)
    p2 = Params(half_width=0.64, n_cells=64)
    d1 = cfl_dt(state_of(128), p1.grid(), p1)
    d2 = cfl_dt(state_of(64), p2.grid(), p2)
    assert d2 == pytest.approx(4.0 * d1, rel=1e-12)


def test_cfl_dt_rejects_nan():
    params = Params(half_width=1.0, n_cells=16)
    state = State(t=0.0, rho=np.ones(16), u=np.zeros(17))
    state.u[3] = np.nan
    with pytest.raises(IntegrationError):
        cfl_dt(state, params.grid(), params)


def test_step_uniform_state_is_fixed_point():
    params = Params(half_width=2.0, n_cells=64)
    grid = params.grid()
    state = State(t=0.0, rho=np.full(64, 0.7), u=np.zeros(65))
    out = step(state, 1e-5, grid, params)
    assert np.array_equal(out.rho, state.rho)
    assert np.array_equal(out.u, state.u)


def test_step_vacuum_is_fixed_point():
    params = Params(half_width=2.0, n_cells=64)
    grid = params.grid()
    state = State(t=0.0, rho=np.zeros(64), u=np.zeros(65))
    out = step(state, 1e-9, grid, params)
    assert np.array_equal(out.rho, state.rho)
    assert np.array_equal(out.u, state.u)


def test_step_conserves_mass_and_positivity():
    params = Params(n_cells=256, half_width=10.0)
    grid = params.grid()
    state, _ = build_initial_data(
        bump_profile(velocity_kind="sine_in_support", velocity_amplitude=-0.4),
        grid,
        params,
    )
    mass0 = state.rho.sum() * grid.dx
    for _ in range(200):
        dt = cfl_dt(state, grid, params)
        state = step(state, dt, grid, params)
        assert state.rho.min() >= 0.0
    mass1 = state.rho.sum() * grid.dx
    assert abs(mass1 - mass0) <= 1e-14 * mass0


def test_run_zero_horizon_returns_initial_state():
    params = Params(n_cells=64, half_width=5.0, t_end=0.0)
    result = run(params, bump_profile())
    assert result.final_state.t == 0.0
    assert len(result.records) == 1
    assert result.audits["steps"] == 0


def test_run_smooth_energy_monotone():
    params = Params(n_cells=256, half_width=10.0, t_end=0.1, diag_every=10)
    result = run(params, bump_profile(background=0.25))
    assert result.audits["max_energy_increase"] <= 0.0 + 1e-15
    assert not result.violations


def test_run_vacuum_completes_nonnegative():
    params = Params(n_cells=256, half_width=10.0, t_end=0.2, diag_every=10)
    result = run(params, bump_profile())
    assert result.audits["aborted"] == ""
    assert result.audits["min_rho"] >= 0.0
    assert result.final_state.t == pytest.approx(0.2)


def test_run_deterministic_record_stream():
    params = Params(n_cells=128, half_width=10.0, t_end=0.05, diag_every=3)
    a = run(params, bump_profile())
    b = run(params, bump_profile())
    assert len(a.records) == len(b.records)
    for ra, rb in zip(a.records, b.records):
        assert ra.as_tuple() == rb.as_tuple()


def test_run_sinks_stream_matches_collected():
    params = Params(n_cells=64, half_width=5.0, t_end=0.02, diag_every=2)
    seen = []
    result = run(params, bump_profile(), sinks=RunSinks(on_record=seen.append))
    assert [r.as_tuple() for r in seen] == [r.as_tuple() for r in result.records]


def test_self_convergence_quick():
    # Richardson self-convergence of the density on smooth data
    sols = {}
    for n in (128, 256, 512):
        params = Params(n_cells=n, half_width=10.0, t_end=0.1, diag_every=10_000)
        result = run(params, bump_profile(background=0.25))
        sols[n] = result.final_state.rho
    restrict = lambda f: 0.5 * (f[0::2] + f[1::2])
    d1 = np.abs(restrict(sols[256]) - sols[128]).sum() * (20.0 / 128)
    d2 = np.abs(restrict(sols[512]) - sols[256]).sum() * (20.0 / 256)
    assert math.log2(d1 / d2) >= 0.8
