"""Method-of-lines finite-difference solver for the Lagrangian system

    v_t = u_x,
    u_t = -p_x + (u_x / v^(alpha+1))_x,

on a truncated domain with far-field Dirichlet boundaries.  Central
second-order differences in space, classical RK4 in time with the step
recomputed every step from the hyperbolic and viscous CFL bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .riemann import GasModel, TwoShockData
from .profile import build_profiles, decay_rates
from .composite import CompositeWave, compute_shift_inputs, solve_shifts

__all__ = [
    "Grid1D",
    "FieldState",
    "SchemeConfig",
    "PositivityError",
    "semidiscrete_rhs",
    "stable_dt",
    "rk4_step",
    "effective_velocity",
    "auto_grid",
    "run_simulation",
    "SimulationResult",
    "Snapshot",
]

# absolute-tolerance goal for composite tails at the domain boundary
_BOUNDARY_GOAL = 1e-13


class PositivityError(RuntimeError):
    """Specific volume lost positivity; carries the offending state."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Uniform grid with n points on [x_lo, x_hi]."""

    x_lo: float
    x_hi: float
    n: int

    def __post_init__(self):
        if self.n < 16:
            raise ValueError("grid needs at least 16 points")
        if not self.x_hi > self.x_lo:
            raise ValueError("x_hi must exceed x_lo")

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / (self.n - 1)

    @cached_property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_lo, self.x_hi, self.n)


@dataclass
class FieldState:
    """Grid solution at time t: arrays of specific volume and velocity."""

    t: float
    v: np.ndarray
    u: np.ndarray

    def copy(self) -> "FieldState":
        return FieldState(self.t, self.v.copy(), self.u.copy())


@dataclass(frozen=True)
class SchemeConfig:
    cfl_hyperbolic: float = 0.4
    cfl_viscous: float = 0.4
    boundary: str = "far-field-dirichlet"

    def __post_init__(self):
        for name in ("cfl_hyperbolic", "cfl_viscous"):
            c = getattr(self, name)
            if not 0.0 < c <= 0.9:
                raise ValueError(f"{name} must lie in (0, 0.9]")
        if self.boundary != "far-field-dirichlet":
            raise ValueError("only far-field-dirichlet boundaries are supported")


def _face_visc(gas: GasModel, vbar):
    return vbar if gas.alpha == 0.0 else vbar ** (gas.alpha + 1.0)


def semidiscrete_rhs(gas: GasModel, state: FieldState, grid: Grid1D):
    """(dv/dt, du/dt) of the second-order central semidiscretization.

    Viscous flux at half points uses the arithmetic-mean volume;
    boundary rows are pinned (zero time derivative).
    """
    v, u = state.v, state.u
    if np.any(v <= 0.0):
        raise PositivityError("nonpositive specific volume in rhs evaluation",
                              state.copy())
    dx = grid.dx
    p = gas.pressure(v)
    vbar = 0.5 * (v[1:] + v[:-1])
    sigma = (u[1:] - u[:-1]) / (dx * _face_visc(gas, vbar))
    dv = np.zeros_like(v)
    du = np.zeros_like(u)
    dv[1:-1] = (u[2:] - u[:-2]) / (2.0 * dx)
    du[1:-1] = -(p[2:] - p[:-2]) / (2.0 * dx) + (sigma[1:] - sigma[:-1]) / dx
    return dv, du


def stable_dt(gas: GasModel, state: FieldState, grid: Grid1D,
              scheme: SchemeConfig = SchemeConfig()) -> float:
    """Explicit step bound: min of hyperbolic and viscous CFL limits."""
    vmin = float(state.v.min())
    if vmin <= 0.0:
        raise PositivityError("nonpositive specific volume", state.copy())
    lam_max = math.sqrt(gas.a * gas.gamma) * vmin ** (-0.5 * (gas.gamma + 1.0))
    dt_h = scheme.cfl_hyperbolic * grid.dx / lam_max
    dt_v = scheme.cfl_viscous * grid.dx ** 2 * vmin ** (gas.alpha + 1.0) / 2.0
    return min(dt_h, dt_v)


def rk4_step(gas: GasModel, state: FieldState, dt: float, grid: Grid1D) -> FieldState:
    """One classical four-stage explicit step; boundary values unchanged."""
    v, u = state.v, state.u
    k1v, k1u = semidiscrete_rhs(gas, state, grid)
    s2 = FieldState(state.t, v + 0.5 * dt * k1v, u + 0.5 * dt * k1u)
    k2v, k2u = semidiscrete_rhs(gas, s2, grid)
    s3 = FieldState(state.t, v + 0.5 * dt * k2v, u + 0.5 * dt * k2u)
    k3v, k3u = semidiscrete_rhs(gas, s3, grid)
    s4 = FieldState(state.t, v + dt * k3v, u + dt * k3u)
    k4v, k4u = semidiscrete_rhs(gas, s4, grid)
    v_new = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    u_new = u + (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
    out = FieldState(state.t + dt, v_new, u_new)
    if np.any(v_new <= 0.0):
        raise PositivityError(f"positivity lost at t = {out.t:.6g}", out)
    return out


def effective_velocity(gas: GasModel, state: FieldState, grid: Grid1D) -> np.ndarray:
    """h = u - v^-(alpha+1) v_x with central differences for v_x."""
    vx = np.gradient(state.v, grid.dx, edge_order=2)
    return state.u - vx / state.v ** (gas.alpha + 1.0)


def auto_grid(gas: GasModel, ts: TwoShockData, beta: float, t_final: float,
              n: Optional[int] = None, dx: float = 0.05) -> Grid1D:
    """Domain containing [s1 T - margin, beta + s2 T + margin].

    The margin is max(20, ln(max(chi)/1e-13)) / c_min so the composite
    tails sit below ~1e-13 at the boundary for all t <= T.
    """
    c1m, c1p = decay_rates(gas, ts.left, ts.mid, ts.s1)
    c2m, c2p = decay_rates(gas, ts.mid, ts.right, ts.s2)
    c_min = min(c1m, c1p, c2m, c2p)
    chi_max = max(ts.chi1, ts.chi2)
    margin = max(20.0, math.log(chi_max / _BOUNDARY_GOAL)) / c_min
    x_lo = ts.s1 * t_final - margin
    x_hi = beta + ts.s2 * t_final + margin
    if n is None:
        n = int(math.ceil((x_hi - x_lo) / dx)) + 1
    return Grid1D(x_lo, x_hi, n)


@dataclass
class Snapshot:
    """Full-field dump at one time."""

    t: float
    x: np.ndarray
    v: np.ndarray
    u: np.ndarray
    V: np.ndarray
    U: np.ndarray
    h: np.ndarray
    H: np.ndarray
    W: np.ndarray

    COLUMNS = ("x", "v", "u", "V", "U", "h", "H", "W")

    def write_csv(self, path):
        cols = [getattr(self, name) for name in self.COLUMNS]
        with open(path, "w") as f:
            f.write(",".join(self.COLUMNS) + "\n")
            for row in zip(*cols):
                f.write(",".join("%.17g" % val for val in row) + "\n")


@dataclass
class SimulationResult:
    series: "DiagnosticsSeries"
    snapshots: list
    composite: CompositeWave
    two_shock: TwoShockData
    grid: Grid1D
    profiles: tuple
    shift_inputs: object
    config: object = None


def _resolve_two_shock(cfg):
    gas = cfg.gas
    return cfg.riemann.resolve(gas)


def _build_composite(cfg, gas, ts):
    p1, p2 = build_profiles(gas, ts)
    if cfg.single_family is None:
        return (p1, p2), CompositeWave(p1, p2, cfg.beta)
    wave = p1 if cfg.single_family == 1 else p2
    return (p1, p2), CompositeWave(wave, None, cfg.beta)


def _schedule(t_final, record_dt, snapshot_times):
    records = [float(t) for t in np.arange(0.0, t_final, record_dt)] + [float(t_final)]
    events = {}
    for t in records:
        events[round(t, 12)] = {"record": True, "snapshot": False}
    for t in snapshot_times:
        key = round(float(t), 12)
        entry = events.setdefault(key, {"record": False, "snapshot": False})
        entry["snapshot"] = True
    return sorted(events.items())


def run_simulation(cfg) -> SimulationResult:
    """Full experiment: Riemann solve, profiles, shifts, evolution.

    Builds the two-shock datum and profiles, applies the configured
    Gaussian perturbations to the unshifted composite, computes the
    shifts from the excess masses, then evolves the perturbed data with
    RK4, recording diagnostics at the configured cadence and snapshots
    at the configured times.
    """
    from . import diagnostics  # deferred: diagnostics imports this module

    gas = cfg.gas
    ts = _resolve_two_shock(cfg)
    profiles, cw0 = _build_composite(cfg, gas, ts)

    grid = cfg.grid.resolve(gas, ts, cfg.beta, cfg.time.t_final)
    x = grid.x

    V0, U0 = cw0.state_fields(x, 0.0)
    v0 = V0.copy()
    u0 = U0.copy()
    for pert in cfg.perturbations:
        bump = pert(x)
        if pert.target == "v":
            v0 += bump
        else:
            u0 += bump

    si = compute_shift_inputs(v0, u0, cw0, grid)
    if cfg.single_family is None:
        b1, b2 = solve_shifts(si, ts)
    else:
        wave = cw0.wave1
        b1 = si.I01 / (wave.state_r.v - wave.state_l.v)
        b2 = 0.0
    cw = cw0.shifted(b1, b2)

    state = FieldState(0.0, v0, u0)
    series = diagnostics.DiagnosticsSeries()
    snapshots = []

    def take_snapshot(st):
        flds = cw.fields(x, st.t)
        h = effective_velocity(gas, st, grid)
        snapshots.append(Snapshot(t=st.t, x=x.copy(), v=st.v.copy(),
                                  u=st.u.copy(), V=flds.V, U=flds.U,
                                  h=h, H=flds.H, W=flds.W))

    schedule = _schedule(cfg.time.t_final, cfg.time.record_dt,
                         cfg.time.snapshot_times)
    for t_target, flags in schedule:
        while state.t < t_target - 1e-12:
            dt = min(stable_dt(gas, state, grid, cfg.scheme),
                     t_target - state.t)
            state = rk4_step(gas, state, dt, grid)
        if flags["record"]:
            series.append(diagnostics.make_record(state, cw, grid))
        if flags["snapshot"]:
            take_snapshot(state)

    return SimulationResult(series=series, snapshots=snapshots, composite=cw,
                            two_shock=ts, grid=grid, profiles=profiles,
                            shift_inputs=si, config=cfg)
