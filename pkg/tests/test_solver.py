import numpy as np
import pytest
from scipy.integrate import solve_ivp

from shockwave_lab import (FieldState, Grid1D, PositivityError, SchemeConfig,
                           auto_grid, effective_velocity, profile_rhs,
                           rk4_step, run_simulation, sample_uniform,
                           semidiscrete_rhs, stable_dt)
from shockwave_lab.config import (ExperimentConfig, GridSpec, Perturbation,
                                  RiemannSpec, TimeSpec)


def _const_state(n, v=1.3, u=-0.2):
    return FieldState(0.0, np.full(n, v), np.full(n, u))


def test_constant_state_is_equilibrium(gas):
    grid = Grid1D(0.0, 5.0, 101)
    dv, du = semidiscrete_rhs(gas, _const_state(101), grid)
    assert np.all(dv == 0.0) and np.all(du == 0.0)


def test_linear_velocity_field(gas):
    grid = Grid1D(0.0, 5.0, 101)
    m = 0.7
    state = FieldState(0.0, np.ones(101), m * grid.x)
    dv, du = semidiscrete_rhs(gas, state, grid)
    assert np.allclose(dv[1:-1], m, rtol=0, atol=1e-12)
    assert np.allclose(du[1:-1], 0.0, rtol=0, atol=1e-12)


def test_rhs_positivity_guard(gas):
    grid = Grid1D(0.0, 5.0, 101)
    state = _const_state(101)
    state.v[50] = -0.1
    with pytest.raises(PositivityError):
        semidiscrete_rhs(gas, state, grid)


def test_traveling_wave_identity_second_order(gas, two_shock):
    """dv/dt + s1 V_x = O(dx^2) on the sampled exact profile."""
    norms = []
    dxs = (0.1, 0.05, 0.025)
    for dx in dxs:
        xi, V, U = sample_uniform(gas, two_shock.left, two_shock.mid,
                                  two_shock.s1, dx)
        grid = Grid1D(float(xi[0]), float(xi[-1]), xi.size)
        dv, _ = semidiscrete_rhs(gas, FieldState(0.0, V, U), grid)
        vx = profile_rhs(gas, two_shock.s1, two_shock.left.v, V)
        r = dv[1:-1] + two_shock.s1 * vx[1:-1]
        norms.append(np.sqrt(np.sum(r ** 2) * dx))
    order = np.polyfit(np.log(dxs), np.log(norms), 1)[0]
    assert 1.7 <= order <= 2.3


def test_stable_dt_hand_value(gas):
    grid = Grid1D(0.0, 5.0, 101)  # dx = 0.05
    dt = stable_dt(gas, FieldState(0.0, np.ones(101), np.zeros(101)), grid)
    assert dt == pytest.approx(5e-4, rel=1e-12)


def test_stable_dt_viscous_scaling(gas):
    state = FieldState(0.0, np.ones(201), np.zeros(201))
    dt1 = stable_dt(gas, FieldState(0.0, np.ones(101), np.zeros(101)),
                    Grid1D(0.0, 5.0, 101))
    dt2 = stable_dt(gas, state, Grid1D(0.0, 5.0, 201))
    assert dt2 <= dt1 / 4.0 + 1e-15


def test_stable_dt_volume_rescale(gas):
    grid = Grid1D(0.0, 5.0, 101)
    for vref in (1.0, 2.0):
        state = FieldState(0.0, np.full(101, vref), np.zeros(101))
        lam = np.sqrt(gas.a * gas.gamma) * vref ** (-0.5 * (gas.gamma + 1.0))
        expect = min(0.4 * grid.dx / lam,
                     0.4 * grid.dx ** 2 * vref ** (gas.alpha + 1.0) / 2.0)
        assert stable_dt(gas, state, grid) == pytest.approx(expect, rel=1e-12)


def test_rk4_preserves_equilibrium(gas):
    grid = Grid1D(0.0, 5.0, 101)
    state = _const_state(101)
    out = rk4_step(gas, state, 1e-3, grid)
    assert np.all(out.v == state.v) and np.all(out.u == state.u)
    assert out.t == pytest.approx(1e-3)


def test_rk4_fourth_order_vs_reference(gas):
    """Global error against a tightly-resolved independent integration."""
    grid = Grid1D(0.0, 10.0, 40)
    x = grid.x
    v0 = 1.0 + 0.4 * np.exp(-((x - 5.0) / 1.2) ** 2)
    u0 = 0.3 * np.exp(-((x - 4.2) / 1.0) ** 2)
    n = grid.n

    def rhs_flat(t, y):
        dv, du = semidiscrete_rhs(gas, FieldState(t, y[:n], y[n:]), grid)
        return np.concatenate([dv, du])

    t_final = 0.4
    ref = solve_ivp(rhs_flat, (0.0, t_final), np.concatenate([v0, u0]),
                    method="RK45", rtol=1e-13, atol=1e-14).y[:, -1]
    errs = []
    steps = (8, 16, 32)
    for nsteps in steps:
        state = FieldState(0.0, v0.copy(), u0.copy())
        dt = t_final / nsteps
        for _ in range(nsteps):
            state = rk4_step(gas, state, dt, grid)
        errs.append(np.max(np.abs(np.concatenate([state.v, state.u]) - ref)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 3.5) and np.all(orders < 4.6)


def test_mass_conservation_over_step(gas, two_shock, profiles):
    """v- and u-mass changes equal the discrete boundary flux integrals."""
    p1, _ = profiles
    grid = Grid1D(-30.0, 30.0, 1201)
    x = grid.x
    V, U, _, _ = p1.evaluate(x)
    state = FieldState(0.0, V.copy(), U.copy())
    dt = stable_dt(gas, state, grid)
    dx = grid.dx

    def masses(st):
        return np.trapezoid(st.v, dx=dx), np.trapezoid(st.u, dx=dx)

    def fluxes(st):
        v, u = st.v, st.u
        p = gas.pressure(v)
        vbar = 0.5 * (v[1:] + v[:-1])
        sigma = (u[1:] - u[:-1]) / (dx * vbar ** (gas.alpha + 1.0))
        fv = 0.5 * (u[-1] + u[-2]) - 0.5 * (u[0] + u[1])
        fu = (-0.5 * (p[-1] + p[-2]) + 0.5 * (p[0] + p[1])
              + sigma[-1] - sigma[0])
        return fv, fu

    mv0, mu0 = masses(state)
    fv, fu = fluxes(state)
    out = rk4_step(gas, state, dt, grid)
    mv1, mu1 = masses(out)
    assert mv1 - mv0 == pytest.approx(dt * fv, abs=1e-12 * max(1.0, abs(dt * fv)))
    assert mu1 - mu0 == pytest.approx(dt * fu, abs=1e-12 * max(1.0, abs(dt * fu)))


def test_rk4_positivity_abort(gas):
    grid = Grid1D(0.0, 1.5, 31)
    v = np.full(31, 1e-3)
    u = np.linspace(1.0, -1.0, 31)  # strong compression
    state = FieldState(0.0, v, u)
    with pytest.raises(PositivityError) as err:
        rk4_step(gas, state, 0.05, grid)
    assert err.value.state is not None


def test_effective_velocity_constant_volume(gas):
    grid = Grid1D(0.0, 5.0, 101)
    state = FieldState(0.0, np.full(101, 2.0), np.sin(grid.x))
    h = effective_velocity(gas, state, grid)
    assert np.allclose(h, state.u, rtol=0, atol=1e-14)


def test_effective_velocity_exponential_volume(gas):
    """alpha = 0, v = e^(k x): h = u - k up to O(dx^2)."""
    k = 0.3
    errs = []
    for n in (101, 201, 401):
        grid = Grid1D(0.0, 5.0, n)
        state = FieldState(0.0, np.exp(k * grid.x), np.zeros(n))
        h = effective_velocity(gas, state, grid)
        errs.append(np.max(np.abs(h[1:-1] + k)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.7)


def test_auto_grid_contains_wave_span(gas, two_shock):
    grid = auto_grid(gas, two_shock, beta=40.0, t_final=10.0)
    assert grid.x_lo < two_shock.s1 * 10.0 - 17.0
    assert grid.x_hi > 40.0 + two_shock.s2 * 10.0 + 17.0


def _single_shock_cfg(t_final=1.0, dx=0.05):
    return ExperimentConfig(
        gas=__import__("shockwave_lab").GasModel(1.0, 2.0, 0.0),
        riemann=RiemannSpec(v_minus=2.0, u_minus=0.0, v_plus=2.0, v_m=1.0),
        beta=0.0,
        grid=GridSpec(dx=dx),
        time=TimeSpec(t_final=t_final, record_dt=t_final / 4.0),
        single_family=1,
    )


def test_run_simulation_single_shock_fidelity():
    res = run_simulation(_single_shock_cfg())
    sup_v = res.series.column("sup_v")
    assert np.max(sup_v) <= 5e-3  # O(dx^2) fidelity to the traveling wave
    t = res.series.t
    assert np.all(np.diff(t) > 0.0)
    for name in ("sup_v", "sup_u", "E0", "E1", "l2_W"):
        assert np.all(np.isfinite(res.series.column(name)))


def test_run_simulation_composite_zero_perturbation(gas):
    cfg = ExperimentConfig(
        gas=gas,
        riemann=RiemannSpec(v_minus=2.0, u_minus=0.0, v_plus=2.0, v_m=1.0),
        beta=30.0,
        grid=GridSpec(dx=0.06),
        time=TimeSpec(t_final=0.5, record_dt=0.25),
    )
    res = run_simulation(cfg)
    assert res.composite.beta1 == pytest.approx(0.0, abs=1e-10)
    assert res.composite.beta2 == pytest.approx(0.0, abs=1e-10)
    assert np.max(res.series.column("sup_v")) <= 8e-3


def test_run_simulation_perturbed_series_contract(gas):
    cfg = ExperimentConfig(
        gas=gas,
        riemann=RiemannSpec(v_minus=2.0, u_minus=0.0, v_plus=2.0, v_m=1.0),
        beta=30.0,
        perturbations=(Perturbation("v", 0.03, 15.0, 1.0),),
        grid=GridSpec(dx=0.06),
        time=TimeSpec(t_final=0.4, record_dt=0.1, snapshot_times=(0.4,)),
    )
    res = run_simulation(cfg)
    t = res.series.t
    assert np.all(np.diff(t) > 0.0)
    assert len(res.snapshots) == 1 and res.snapshots[0].t == pytest.approx(0.4)
    assert res.composite.beta1 != 0.0
