"""Viscous shock profiles: traveling-wave ODE integration and evaluation.

A family-i wave with speed s connects state_l (xi -> -inf) to state_r
(xi -> +inf).  Eliminating U through the mass relation
U = u_l - s (V - v_l) reduces the traveling-wave system to the scalar
ODE

    dV/dxi = g(V) = -V**(alpha+1) (s^2 (V - v_l) + p(V) - p(v_l)) / s,

whose fixed points are the two end volumes (the right one by the
Rankine-Hugoniot relation).  The profile is normalized by
V(0) = (v_l + v_r) / 2.

Integration runs separately on each half line in the gap variable
w = V - v_end of that half's end state, with the bracket written as
s^2 w + (p(v_end + w) - p(v_end)) so that both terms are O(w); this
keeps the exponential tails at full relative accuracy down to the
tail-switch tolerance.  Beyond the tabulated range the analytic tails

    V = v_end + w_edge * exp(-+ c_pm (xi - xi_edge))

take over, matched continuously at the table ends, with rates from the
endpoint linearization

    c = v_end**(alpha+1) |s^2 + p'(v_end)| / |s|.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from .riemann import EndState, GasModel, TwoShockData, pressure_increment

__all__ = [
    "GAP_TOL",
    "ShockProfile",
    "DegenerateWaveError",
    "IntegrationError",
    "TailTruncatedWarning",
    "profile_rhs",
    "decay_rates",
    "integrate_profile",
    "build_profiles",
    "eval_profile",
    "sample_uniform",
]

GAP_TOL = 1e-10        # tail-switch tolerance on |V - v_end|
_GAP_SAFETY = 0.98     # integration stops just inside the tolerance
_ODE_RTOL = 1e-12


class DegenerateWaveError(ValueError):
    """Zero-strength wave: the profile construction divides by chi."""


class IntegrationError(RuntimeError):
    """Profile integration produced an unusable (non-monotone) table."""


class TailTruncatedWarning(UserWarning):
    """xi_max was reached before the endpoint gap fell below tol."""


def profile_rhs(gas: GasModel, s: float, v_left: float, V):
    """dV/dxi along the traveling wave anchored at the xi -> -inf volume.

    Vanishes at v_left exactly and at the far volume up to the RH
    residual of (s, v_left).
    """
    if np.any(np.asarray(V) <= 0.0):
        raise ValueError("specific volume must be positive")
    scalar = np.ndim(V) == 0
    V = np.asarray(V, dtype=np.float64)
    bracket = s * s * (V - v_left) + gas.pressure(V) - gas.pressure(v_left)
    out = -(V ** (gas.alpha + 1.0)) * bracket / s
    return float(out) if scalar else out


def decay_rates(gas: GasModel, state_l: EndState, state_r: EndState, s: float):
    """Exponential tail rates (c_minus, c_plus) at the two end states.

    Realized as the linearization of the profile ODE at each endpoint:
    c = v_end**(alpha+1) |s^2 + p'(v_end)| / |s|.  Positive whenever
    the entropy inequalities hold strictly.
    """
    if state_l.v == state_r.v:
        raise DegenerateWaveError("zero-strength wave has no decay rates")
    q = s * s

    def rate(v_end):
        return v_end ** (gas.alpha + 1.0) * abs(q + gas.dpressure(v_end)) / abs(s)

    return rate(state_l.v), rate(state_r.v)


def _g_from_end(gas: GasModel, s: float, v_end: float, w):
    """Profile slope with the bracket anchored at v_end (cancellation-free)."""
    V = v_end + w
    bracket = (s * s) * w + pressure_increment(gas, v_end, w)
    return -(V ** (gas.alpha + 1.0)) * bracket / s


def _toward_zero(w):
    """True if w keeps one sign and |w| is strictly decreasing."""
    w = np.asarray(w)
    if np.any(w == 0.0) or np.any(np.sign(w) != np.sign(w[0])):
        return False
    return bool(np.all(np.diff(np.abs(w)) < 0.0))


def _monotone_spline(gas, s, v_end, xi, w):
    """C^1 cubic through the gap table with exact nodal slopes g(V).

    Exact slopes make the interpolant fourth-order, which the shift
    quadratures need.  Monotonicity is verified per interval with the
    Fritsch-Carlson sufficient condition (sign(d) = sign(secant) and
    |d| <= 3|secant| at both ends); on the rare failure the monotone
    cubic with approximated slopes is used instead.
    """
    d = _g_from_end(gas, s, v_end, w)
    sec = np.diff(w) / np.diff(xi)
    ok = ((np.sign(d[:-1]) == np.sign(sec)) &
          (np.sign(d[1:]) == np.sign(sec)) &
          (np.abs(d[:-1]) <= 3.0 * np.abs(sec)) &
          (np.abs(d[1:]) <= 3.0 * np.abs(sec)))
    if np.all(ok):
        return CubicHermiteSpline(xi, w, d, extrapolate=False)
    return PchipInterpolator(xi, w, extrapolate=False)


def _integrate_half(gas, s, v_end, w0, gap_target, xi_max, orient, spacing):
    """Integrate the gap w = V - v_end from w0 toward 0.

    orient = +1 integrates the xi > 0 half, orient = -1 the xi < 0 half
    (internally tau = orient * xi >= 0 in both cases).  Returns
    (tau, w, truncated) with tau ascending from 0.
    """
    def rhs(tau, y):
        return [orient * _g_from_end(gas, s, v_end, y[0])]

    if not rhs(0.0, [w0])[0] * w0 < 0.0:
        raise IntegrationError("gap does not contract toward the end state")

    def reached(tau, y):
        return abs(y[0]) - gap_target

    reached.terminal = True
    reached.direction = -1.0

    sol = solve_ivp(rhs, (0.0, xi_max), [w0], method="RK45",
                    rtol=_ODE_RTOL, atol=1e-4 * gap_target,
                    events=reached, dense_output=True)
    if not sol.success:
        raise IntegrationError(f"profile integration failed: {sol.message}")
    truncated = sol.t_events[0].size == 0
    tau_end = xi_max if truncated else float(sol.t_events[0][0])
    n = max(int(math.ceil(tau_end / spacing)), 8)
    tau = np.linspace(0.0, tau_end, n + 1)
    w = sol.sol(tau)[0]
    w[0] = w0
    if not truncated:
        w[-1] = float(sol.y_events[0][0, 0])
    if not _toward_zero(w):
        raise IntegrationError("non-monotone profile table (integration overshoot)")
    return tau, w, truncated


@dataclass(frozen=True, eq=False)
class ShockProfile:
    """Tabulated traveling wave with analytic exponential tails.

    The table stores the gap to the matching end state on each half
    line; V, U and their xi-derivatives are reconstructed from it.
    U = u_l - s (V - v_l) holds exactly, so U_x = -s V_x <= 0.
    """

    family: int
    gas: GasModel
    state_l: EndState
    state_r: EndState
    s: float
    chi: float
    c_minus: float
    c_plus: float
    truncated: bool
    v0: float
    _xi_l: np.ndarray = field(repr=False)
    _w_l: np.ndarray = field(repr=False)
    _xi_r: np.ndarray = field(repr=False)
    _w_r: np.ndarray = field(repr=False)
    _ip_l: PchipInterpolator = field(repr=False)
    _ip_r: PchipInterpolator = field(repr=False)

    # -- geometry ----------------------------------------------------

    @property
    def v_mid(self) -> float:
        return 0.5 * (self.state_l.v + self.state_r.v)

    @property
    def xi_span(self):
        return float(self._xi_l[0]), float(self._xi_r[-1])

    @property
    def xi_table(self) -> np.ndarray:
        return np.concatenate([self._xi_l[:-1], self._xi_r])

    @property
    def v_table(self) -> np.ndarray:
        left = self.state_l.v + self._w_l[:-1]
        right = self.state_r.v + self._w_r
        right = right.copy()
        right[0] = self.v0
        return np.concatenate([left, right])

    @property
    def u_table(self) -> np.ndarray:
        return self.state_l.u - self.s * (self.v_table - self.state_l.v)

    # -- evaluation --------------------------------------------------

    def _regions(self, xi):
        lt = xi < self._xi_l[0]
        rt = xi > self._xi_r[-1]
        tl = (~lt) & (xi <= 0.0)
        tr = (~rt) & (xi > 0.0)
        return lt, tl, tr, rt

    def _gaps(self, xi):
        """(V - v_l, V - v_r) for array xi, cancellation-free per side."""
        xi = np.asarray(xi, dtype=np.float64)
        jump = self.state_r.v - self.state_l.v
        lt, tl, tr, rt = self._regions(xi)
        gl = np.empty(xi.shape)
        gr = np.empty(xi.shape)
        gl[lt] = self._w_l[0] * np.exp(self.c_minus * (xi[lt] - self._xi_l[0]))
        gl[tl] = self._ip_l(xi[tl])
        gr[lt] = gl[lt] - jump
        gr[tl] = gl[tl] - jump
        gr[tr] = self._ip_r(xi[tr])
        gr[rt] = self._w_r[-1] * np.exp(-self.c_plus * (xi[rt] - self._xi_r[-1]))
        gl[tr] = gr[tr] + jump
        gl[rt] = gr[rt] + jump
        return gl, gr

    def gap_left(self, xi):
        """V(xi) - v_l, accurate in relative terms on the left tail."""
        scalar = np.ndim(xi) == 0
        gl, _ = self._gaps(np.atleast_1d(np.asarray(xi, dtype=np.float64)))
        return float(gl[0]) if scalar else gl

    def gap_right(self, xi):
        """V(xi) - v_r, accurate in relative terms on the right tail."""
        scalar = np.ndim(xi) == 0
        _, gr = self._gaps(np.atleast_1d(np.asarray(xi, dtype=np.float64)))
        return float(gr[0]) if scalar else gr

    def evaluate(self, xi):
        """(V, U, V_x, U_x) at xi (scalar or array)."""
        scalar = np.ndim(xi) == 0
        xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
        gl, gr = self._gaps(xi)
        lt, tl, tr, rt = self._regions(xi)
        left_side = lt | tl
        V = np.where(left_side, self.state_l.v + gl, self.state_r.v + gr)
        vx = np.empty(xi.shape)
        vx[lt] = self.c_minus * gl[lt]
        vx[tl] = _g_from_end(self.gas, self.s, self.state_l.v, gl[tl])
        vx[tr] = _g_from_end(self.gas, self.s, self.state_r.v, gr[tr])
        vx[rt] = -self.c_plus * gr[rt]
        U = self.state_l.u - self.s * gl
        ux = -self.s * vx
        if scalar:
            return float(V[0]), float(U[0]), float(vx[0]), float(ux[0])
        return V, U, vx, ux


def eval_profile(profile: ShockProfile, xi):
    """(V, U, V_x, U_x) of a shock profile at xi."""
    return profile.evaluate(xi)


def _default_xi_max(chi, c, gap_target):
    return (math.log(max(abs(chi), 1e-3) / gap_target) + 25.0) / c


def integrate_profile(gas: GasModel, state_l: EndState, state_r: EndState,
                      s: float, family: int, tol: float = GAP_TOL,
                      xi_max: Optional[float] = None,
                      start_volume: Optional[float] = None) -> ShockProfile:
    """Integrate the traveling-wave ODE into an evaluable ShockProfile.

    Starts from V(0) = (v_l + v_r)/2 and integrates both half lines
    until the endpoint gap drops below tol (or |xi| exceeds xi_max, in
    which case the profile is returned flagged and a TailTruncatedWarning
    is issued).  start_volume overrides the midpoint normalization;
    translating a profile is equivalent to re-normalizing it, which the
    tests exploit.
    """
    if family not in (1, 2):
        raise ValueError("family must be 1 or 2")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    chi = abs(state_r.v - state_l.v)
    if chi == 0.0:
        raise DegenerateWaveError("zero-strength wave cannot be integrated")
    if family == 1 and not (s < 0.0 and state_r.v < state_l.v):
        raise ValueError("family-1 wave needs s < 0 and a decreasing volume")
    if family == 2 and not (s > 0.0 and state_r.v > state_l.v):
        raise ValueError("family-2 wave needs s > 0 and an increasing volume")

    c_minus, c_plus = decay_rates(gas, state_l, state_r, s)
    gap_target = _GAP_SAFETY * tol
    spacing = min(0.01, 0.05 / max(c_minus, c_plus))
    mid = 0.5 * (state_l.v + state_r.v) if start_volume is None else start_volume
    lo, hi = min(state_l.v, state_r.v), max(state_l.v, state_r.v)
    if not lo < mid < hi:
        raise ValueError("start_volume must lie strictly between the end volumes")

    xi_max_l = xi_max if xi_max is not None else _default_xi_max(chi, c_minus, gap_target)
    xi_max_r = xi_max if xi_max is not None else _default_xi_max(chi, c_plus, gap_target)

    tau_r, w_r, trunc_r = _integrate_half(
        gas, s, state_r.v, mid - state_r.v, gap_target, xi_max_r, +1, spacing)
    tau_l, w_l, trunc_l = _integrate_half(
        gas, s, state_l.v, mid - state_l.v, gap_target, xi_max_l, -1, spacing)

    truncated = trunc_l or trunc_r
    if truncated:
        warnings.warn("profile tail truncated at xi_max before reaching tol",
                      TailTruncatedWarning)

    xi_l = -tau_l[::-1]
    wl = w_l[::-1]
    ip_l = _monotone_spline(gas, s, state_l.v, xi_l, wl)
    ip_r = _monotone_spline(gas, s, state_r.v, tau_r, w_r)

    return ShockProfile(family=family, gas=gas, state_l=state_l,
                        state_r=state_r, s=s, chi=chi,
                        c_minus=c_minus, c_plus=c_plus, truncated=truncated,
                        v0=mid, _xi_l=xi_l, _w_l=wl, _xi_r=tau_r, _w_r=w_r,
                        _ip_l=ip_l, _ip_r=ip_r)


def build_profiles(gas: GasModel, ts: TwoShockData, tol: float = GAP_TOL,
                   xi_max: Optional[float] = None):
    """Both shock profiles of a two-shock datum."""
    p1 = integrate_profile(gas, ts.left, ts.mid, ts.s1, 1, tol=tol, xi_max=xi_max)
    p2 = integrate_profile(gas, ts.mid, ts.right, ts.s2, 2, tol=tol, xi_max=xi_max)
    return p1, p2


def sample_uniform(gas: GasModel, state_l: EndState, state_r: EndState,
                   s: float, h: float, tol: float = GAP_TOL,
                   xi_max: Optional[float] = None):
    """(xi, V, U) on an exactly uniform grid of spacing h spanning the wave.

    Node values come straight from the dense ODE solution (no table
    interpolation), which makes the samples suitable for discretization
    order studies of the steady system.
    """
    chi = abs(state_r.v - state_l.v)
    if chi == 0.0:
        raise DegenerateWaveError("zero-strength wave cannot be sampled")
    c_minus, c_plus = decay_rates(gas, state_l, state_r, s)
    gap_target = _GAP_SAFETY * tol
    mid = 0.5 * (state_l.v + state_r.v)
    xi_max_l = xi_max if xi_max is not None else _default_xi_max(chi, c_minus, gap_target)
    xi_max_r = xi_max if xi_max is not None else _default_xi_max(chi, c_plus, gap_target)

    def half(v_end, w0, cap, orient):
        def rhs(tau, y):
            return [orient * _g_from_end(gas, s, v_end, y[0])]

        def reached(tau, y):
            return abs(y[0]) - gap_target

        reached.terminal = True
        reached.direction = -1.0
        sol = solve_ivp(rhs, (0.0, cap), [w0], method="RK45",
                        rtol=_ODE_RTOL, atol=1e-4 * gap_target,
                        events=reached, dense_output=True)
        if not sol.success:
            raise IntegrationError(f"profile integration failed: {sol.message}")
        tau_end = cap if sol.t_events[0].size == 0 else float(sol.t_events[0][0])
        m = int(math.floor(tau_end / h))
        tau = h * np.arange(m + 1)
        w = sol.sol(tau)[0]
        w[0] = w0
        return tau, w

    tau_r, w_r = half(state_r.v, mid - state_r.v, xi_max_r, +1)
    tau_l, w_l = half(state_l.v, mid - state_l.v, xi_max_l, -1)

    xi = np.concatenate([-tau_l[:0:-1], tau_r])
    V = np.concatenate([state_l.v + w_l[:0:-1], state_r.v + w_r])
    V[tau_l.size - 1] = mid
    U = state_l.u - s * (V - state_l.v)
    return xi, V, U
