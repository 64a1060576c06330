"""Verification suites: each acceptance criterion is executed by exactly
one suite and reported as one machine-readable line

    <name>,<measured>,<threshold>,<PASS|FAIL>

Suites: riemann, profile, shifts, wdecay, convergence, stability, all.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .riemann import (EndState, GasModel, entropy_margins, hugoniot_u,
                      in_ss_region, rh_residuals, solve_intermediate)
from .profile import build_profiles, sample_uniform
from .composite import (CompositeWave, compute_shift_inputs, interaction_norm,
                        predicted_w_decay, solve_shifts)
from .solver import (FieldState, Grid1D, SchemeConfig, rk4_step,
                     run_simulation, stable_dt)
from .diagnostics import (antiderivatives, closed_form_Psi,
                          fit_exponential_rate)
from .config import (ExperimentConfig, GridSpec, Perturbation, RiemannSpec,
                     TimeSpec)

__all__ = ["CriterionResult", "SUITE_NAMES", "run_suite", "format_result"]

SUITE_NAMES = ("riemann", "profile", "shifts", "wdecay", "convergence",
               "stability", "all")

# canonical datum: gamma=2, a=1, alpha=0, v_- = 2, v_m = 1, v_+ = 2
C_PLUS_TARGET = 1.443376
C_MINUS_TARGET = 1.154701


@dataclass(frozen=True)
class CriterionResult:
    name: str
    measured: float
    threshold: str
    passed: bool


def format_result(r: CriterionResult) -> str:
    return f"{r.name},{r.measured:.6g},{r.threshold},{'PASS' if r.passed else 'FAIL'}"


def _max_workers(n_tasks: int) -> int:
    env = os.environ.get("SHOCKWAVE_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, n_tasks))


def canonical_gas() -> GasModel:
    return GasModel(a=1.0, gamma=2.0, alpha=0.0)


def canonical_two_shock(gas=None):
    gas = gas or canonical_gas()
    left = EndState(2.0, 0.0)
    u_m = float(hugoniot_u(gas, left, 1.0))
    u_p = float(hugoniot_u(gas, EndState(1.0, u_m), 2.0))
    return solve_intermediate(gas, left, EndState(2.0, u_p))


# ----------------------------------------------------------------- riemann

def suite_riemann(n_cases: int = 200, seed: int = 20260809):
    """Criterion 1: randomized SS data solve to RH exactness."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst_rh = 0.0
    worst_vm = 0.0
    min_margin = math.inf
    for _ in range(n_cases):
        gamma = rng.uniform(1.1, 3.0)
        a = rng.uniform(0.5, 2.0)
        gas = GasModel(a=a, gamma=gamma, alpha=0.0)
        v_m = rng.uniform(0.4, 2.5)
        chi1 = rng.uniform(0.05, 3.0)
        chi2 = rng.uniform(0.05, 3.0)
        u_minus = rng.uniform(-1.0, 1.0)
        left = EndState(v_m + chi1, u_minus)
        u_m = float(hugoniot_u(gas, left, v_m))
        mid = EndState(v_m, u_m)
        u_plus = float(hugoniot_u(gas, mid, v_m + chi2))
        right = EndState(v_m + chi2, u_plus)
        if not in_ss_region(gas, left, right):
            worst_rh = math.inf
            continue
        ts = solve_intermediate(gas, left, right)
        scale = max(1.0, abs(left.u), abs(right.u))
        worst_rh = max(worst_rh,
                       max(abs(r) for r in rh_residuals(gas, ts)) / scale)
        worst_vm = max(worst_vm, abs(ts.mid.v - v_m) / v_m)
        m1, m2 = entropy_margins(gas, ts)
        min_margin = min(min_margin, *m1, *m2)
    elapsed = time.perf_counter() - t0
    return [
        CriterionResult("riemann.rh_residual", worst_rh, "<=1e-12*scale",
                        worst_rh <= 1e-12),
        CriterionResult("riemann.vm_roundtrip", worst_vm, "<=1e-10",
                        worst_vm <= 1e-10),
        CriterionResult("riemann.entropy_margin", min_margin, ">0",
                        min_margin > 0.0),
        CriterionResult("riemann.runtime_s", elapsed, "<5", elapsed < 5.0),
    ]


# ----------------------------------------------------------------- profile

def _steady_residual_l2(gas, state_l, state_r, s, h):
    """L2 norm of the discretized steady momentum equation at table nodes."""
    xi, V, U = sample_uniform(gas, state_l, state_r, s, h)
    p = gas.pressure(V)
    vbar = 0.5 * (V[1:] + V[:-1])
    sigma = (U[1:] - U[:-1]) / (h * vbar ** (gas.alpha + 1.0))
    R = (-s * (U[2:] - U[:-2]) / (2.0 * h)
         + (p[2:] - p[:-2]) / (2.0 * h)
         - (sigma[1:] - sigma[:-1]) / h)
    return float(np.sqrt(np.sum(R * R) * h))


def measured_tail_rates(profile):
    """Log-slope fits of the tabulated tails on gaps in [1e-8, 1e-3]."""
    def fit(xi, w, sign):
        mask = (np.abs(w) >= 1e-8) & (np.abs(w) <= 1e-3)
        slope = np.polyfit(xi[mask], np.log(np.abs(w[mask])), 1)[0]
        return sign * slope

    c_minus = fit(profile._xi_l, profile._w_l, +1.0)
    c_plus = fit(profile._xi_r, profile._w_r, -1.0)
    return c_minus, c_plus


def suite_profile():
    """Criterion 2: canonical profile fidelity (residual order, tail rates)."""
    t0 = time.perf_counter()
    gas = canonical_gas()
    ts = canonical_two_shock(gas)
    hs = np.array([0.1, 0.05, 0.025])
    res = [_steady_residual_l2(gas, ts.left, ts.mid, ts.s1, h) for h in hs]
    order = float(np.polyfit(np.log(hs), np.log(res), 1)[0])

    p1, _ = build_profiles(gas, ts)
    c_minus_fit, c_plus_fit = measured_tail_rates(p1)
    err_plus = abs(c_plus_fit / C_PLUS_TARGET - 1.0)
    err_minus = abs(c_minus_fit / C_MINUS_TARGET - 1.0)
    elapsed = time.perf_counter() - t0
    return [
        CriterionResult("profile.residual_order", order, "2.0+-0.3",
                        1.7 <= order <= 2.3),
        CriterionResult("profile.c_plus_fit_relerr", err_plus, "<=0.02",
                        err_plus <= 0.02),
        CriterionResult("profile.c_minus_fit_relerr", err_minus, "<=0.02",
                        err_minus <= 0.02),
        CriterionResult("profile.runtime_s", elapsed, "<10", elapsed < 10.0),
    ]


# ----------------------------------------------------------------- shifts

def _shift_grid(beta):
    # wide enough that shifted-composite boundary residuals sit below 1e-12
    margin = 27.0
    x_lo, x_hi = -margin, beta + margin
    n = int(round((x_hi - x_lo) / 0.02)) + 1
    return Grid1D(x_lo, x_hi, n)


def suite_shifts(n_cases: int = 50, seed: int = 4257):
    """Criterion 3: post-shift excess masses vanish."""
    t0 = time.perf_counter()
    gas = canonical_gas()
    ts = canonical_two_shock(gas)
    p1, p2 = build_profiles(gas, ts)
    beta = 40.0
    cw0 = CompositeWave(p1, p2, beta)
    grid = _shift_grid(beta)
    x = grid.x
    V0, U0 = cw0.state_fields(x, 0.0)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_cases):
        v0 = V0.copy()
        u0 = U0.copy()
        for _ in range(rng.integers(1, 4)):
            pert = Perturbation(
                target=("v", "u")[rng.integers(0, 2)],
                amplitude=rng.uniform(-0.1, 0.1),
                center=rng.uniform(8.0, 32.0),
                width=rng.uniform(0.5, 2.0))
            if pert.target == "v":
                v0 += pert(x)
            else:
                u0 += pert(x)
        si = compute_shift_inputs(v0, u0, cw0, grid)
        b1, b2 = solve_shifts(si, ts)
        si2 = compute_shift_inputs(v0, u0, cw0.shifted(b1, b2), grid)
        scale = max(1.0, abs(si.I01), abs(si.I02))
        worst = max(worst, abs(si2.I01) / scale, abs(si2.I02) / scale)
    elapsed = time.perf_counter() - t0
    return [
        CriterionResult("shifts.zero_mass_residual", worst, "<=1e-8*scale",
                        worst <= 1e-8),
        CriterionResult("shifts.runtime_s", elapsed, "<30", elapsed < 30.0),
    ]


# ----------------------------------------------------------------- W decay

def _wdecay_grid(ts, beta, t_max, c_min):
    pad = 40.0 / c_min
    x_lo = ts.s1 * t_max - pad
    x_hi = beta + ts.s2 * t_max + pad
    n = int(round((x_hi - x_lo) / 0.05)) + 1
    return Grid1D(x_lo, x_hi, n)


def suite_wdecay():
    """Criterion 4: interaction-term decay rate and separation gain."""
    t0 = time.perf_counter()
    gas = canonical_gas()
    ts = canonical_two_shock(gas)
    p1, p2 = build_profiles(gas, ts)
    c_prime, c_minus_const = predicted_w_decay(ts, p1, p2)
    c_min = min(p1.c_minus, p1.c_plus, p2.c_minus, p2.c_plus)

    cw40 = CompositeWave(p1, p2, 40.0)
    grid40 = _wdecay_grid(ts, 40.0, 10.0, c_min)
    t_samples = np.linspace(0.0, 10.0, 81)
    norms = np.array([interaction_norm(cw40, t, grid40) for t in t_samples])
    fit = fit_exponential_rate(t_samples, norms)

    cw60 = CompositeWave(p1, p2, 60.0)
    grid60 = _wdecay_grid(ts, 60.0, 0.0, c_min)
    w0_40 = interaction_norm(cw40, 0.0, _wdecay_grid(ts, 40.0, 0.0, c_min))
    w0_60 = interaction_norm(cw60, 0.0, grid60)
    gain = w0_40 / w0_60
    gain_needed = math.exp(c_minus_const * 20.0 * 0.5)
    elapsed = time.perf_counter() - t0
    return [
        CriterionResult("wdecay.rate", fit.rate, f">={0.9 * c_prime:.6g}",
                        fit.rate >= 0.9 * c_prime),
        CriterionResult("wdecay.beta_gain", gain, f">={gain_needed:.6g}",
                        gain >= gain_needed),
        CriterionResult("wdecay.runtime_s", elapsed, "<60", elapsed < 60.0),
    ]


# ------------------------------------------------------------ convergence

def _single_shock_run(gas, ts, profile, dx, t_final, sample_dt=0.25):
    """Evolve the exact family-1 profile; return (l2_error, times, crossings)."""
    margin = 30.0 / min(profile.c_minus, profile.c_plus)
    x_lo = ts.s1 * t_final - margin
    x_hi = margin
    n = int(round((x_hi - x_lo) / dx)) + 1
    grid = Grid1D(x_lo, x_hi, n)
    x = grid.x
    V, U, _, _ = profile.evaluate(x)
    state = FieldState(0.0, V.copy(), U.copy())
    scheme = SchemeConfig()
    v_cross = 0.5 * (ts.left.v + ts.mid.v)

    def crossing(v):
        idx = np.where((v[:-1] - v_cross) * (v[1:] - v_cross) <= 0.0)[0]
        i = int(idx[0])
        frac = (v[i] - v_cross) / (v[i] - v[i + 1])
        return float(x[i] + frac * grid.dx)

    times, crossings = [0.0], [crossing(state.v)]
    targets = np.arange(sample_dt, t_final + 1e-9, sample_dt)
    for t_target in targets:
        while state.t < t_target - 1e-12:
            dt = min(stable_dt(gas, state, grid, scheme), t_target - state.t)
            state = rk4_step(gas, state, dt, grid)
        times.append(state.t)
        crossings.append(crossing(state.v))
    V_exact, _, _, _ = profile.evaluate(x - ts.s1 * t_final)
    err = float(np.sqrt(np.trapezoid((state.v - V_exact) ** 2, x)))
    return err, np.array(times), np.array(crossings)


def suite_convergence():
    """Criterion 5: grid convergence and shock-speed fidelity."""
    t0 = time.perf_counter()
    gas = canonical_gas()
    ts = canonical_two_shock(gas)
    p1, _ = build_profiles(gas, ts)
    dxs = [0.1, 0.05, 0.025]
    with ThreadPoolExecutor(max_workers=_max_workers(len(dxs))) as pool:
        futures = [pool.submit(_single_shock_run, gas, ts, p1, dx, 5.0)
                   for dx in dxs]
        results = [f.result() for f in futures]
    errors = np.array([r[0] for r in results])
    order = float(np.polyfit(np.log(dxs), np.log(errors), 1)[0])
    times, crossings = results[-1][1], results[-1][2]
    speed = float(np.polyfit(times, crossings, 1)[0])
    speed_err = abs(speed / ts.s1 - 1.0)
    elapsed = time.perf_counter() - t0
    return [
        CriterionResult("convergence.order", order, "2.0+-0.3",
                        1.7 <= order <= 2.3),
        CriterionResult("convergence.speed_relerr", speed_err, "<=0.01",
                        speed_err <= 0.01),
        CriterionResult("convergence.runtime_s", elapsed, "<120",
                        elapsed < 120.0),
    ]


# -------------------------------------------------------------- stability

def stability_config() -> ExperimentConfig:
    """The desk-scale composite stability experiment."""
    return ExperimentConfig(
        gas=canonical_gas(),
        riemann=RiemannSpec(v_minus=2.0, u_minus=0.0, v_plus=2.0, v_m=1.0),
        beta=40.0,
        perturbations=(Perturbation("v", 0.05, 20.0, 1.0),
                       Perturbation("u", 0.05, 20.0, 1.0)),
        grid=GridSpec(n=4000),
        time=TimeSpec(t_final=50.0, record_dt=0.25,
                      snapshot_times=(0.0, 5.0, 50.0)),
    )


def _psi_consistency_order(snap, cw):
    """Order of agreement between quadrature Psi and its closed form,
    measured by coarsening one snapshot (h, 2h, 4h)."""
    errs = []
    hs = []
    for k in (1, 2, 4):
        x = snap.x[::k]
        grid_k = Grid1D(float(x[0]), float(x[-1]), x.size)
        state = FieldState(snap.t, snap.v[::k].copy(), snap.u[::k].copy())
        fields = antiderivatives(state, cw, grid_k)
        psi_closed = closed_form_Psi(state, cw, grid_k, fields)
        errs.append(float(np.max(np.abs(fields.Psi - psi_closed))))
        hs.append(grid_k.dx)
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])


def suite_stability(result=None):
    """Criteria 6-8: composite-wave stability, energy structure, and
    effective-velocity consistency, all from one perturbed run."""
    t0 = time.perf_counter()
    cfg = stability_config()
    if result is None:
        result = run_simulation(cfg)
    series = result.series
    t = series.t
    early = t <= 5.0 + 1e-9
    base_v = float(series.column("sup_v")[early].max())
    base_u = float(series.column("sup_u")[early].max())
    final_v = float(series.column("sup_v")[-1])
    final_u = float(series.column("sup_u")[-1])
    ratio_v = final_v / base_v
    ratio_u = final_u / base_u

    v_min = float(series.column("v_min").min())
    v_max = float(series.column("v_max").max())
    ts = result.two_shock
    lo_bound = 0.5 * ts.mid.v
    hi_bound = 1.5 * max(ts.left.v, ts.right.v)
    interval_ok = v_min >= lo_bound and v_max <= hi_bound

    p1, p2 = result.profiles
    _, c_minus_const = predicted_w_decay(ts, p1, p2)
    e_total = series.column("E0") + series.column("E1")
    denom = e_total[0] + math.exp(-c_minus_const * cfg.beta)
    energy_ratio = float(e_total.max() / denom)
    min_f = float(series.column("min_f").min())
    max_viol = float(series.column("ineq_violation").max())

    orders = [_psi_consistency_order(s, result.composite)
              for s in result.snapshots if s.t > 0.0]
    psi_order = min(orders)
    elapsed = time.perf_counter() - t0
    return [
        CriterionResult("stability.sup_v_ratio", ratio_v, "<=0.2",
                        ratio_v <= 0.2),
        CriterionResult("stability.sup_u_ratio", ratio_u, "<=0.2",
                        ratio_u <= 0.2),
        CriterionResult("stability.v_min", v_min, f">={lo_bound:g}",
                        interval_ok),
        CriterionResult("stability.v_max", v_max, f"<={hi_bound:g}",
                        v_max <= hi_bound),
        CriterionResult("energy.bound_ratio", energy_ratio, "<=3",
                        energy_ratio <= 3.0),
        CriterionResult("energy.min_f", min_f, ">0", min_f > 0.0),
        CriterionResult("energy.pointwise_violation", max_viol, "<=1e-12",
                        max_viol <= 1e-12),
        CriterionResult("psi.consistency_order", psi_order, ">=1.7",
                        psi_order >= 1.7),
        CriterionResult("stability.runtime_s", elapsed, "<600",
                        elapsed < 600.0),
    ]


# ------------------------------------------------------------------ driver

_SUITES = {
    "riemann": suite_riemann,
    "profile": suite_profile,
    "shifts": suite_shifts,
    "wdecay": suite_wdecay,
    "convergence": suite_convergence,
    "stability": suite_stability,
}


def run_suite(name: str):
    """Run one suite (or 'all'); returns (results, all_passed)."""
    if name == "all":
        results = []
        for suite in _SUITES.values():
            results.extend(suite())
    elif name in _SUITES:
        results = _SUITES[name]()
    else:
        raise ValueError(f"unknown suite '{name}'; choose from {SUITE_NAMES}")
    return results, all(r.passed for r in results)
