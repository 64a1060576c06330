"""Monitored quantities of the perturbation analysis.

Anti-derivative perturbations (phi, psi, Psi), discrete Sobolev norms,
the nonlinear terms (f, F, G, p(v|V)), the interaction residual norm,
the quadratic energy functionals, exponential rate fits, and the
pointwise inequality checks evaluated analytically on the composite.

phi_x = v - V and psi_x = u - U are identities (not differenced);
perturbation second derivatives use the same central stencils as the
solver, while every composite-wave derivative is analytic so the
inequality checks sit at machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .composite import CompositeWave, TruncationError
from .solver import FieldState, Grid1D, effective_velocity

__all__ = [
    "PerturbationFields",
    "PerturbationTerms",
    "SobolevNorms",
    "RateFit",
    "InequalityReport",
    "DiagnosticsRecord",
    "DiagnosticsSeries",
    "DIAG_CSV_COLUMNS",
    "antiderivatives",
    "closed_form_Psi",
    "sobolev_norms",
    "perturbation_terms",
    "energy_functionals",
    "fit_exponential_rate",
    "pointwise_inequality_report",
    "make_record",
]

BOUNDARY_DECAY_TOL = 1e-12

DIAG_CSV_COLUMNS = ("t", "sup_v", "sup_u", "l2_phi", "h1_phi", "h2_phi",
                    "l2_psi", "h1_psi", "l2_Psi", "l2_W", "E0", "E1",
                    "min_f", "ineq_violation")


@dataclass
class PerturbationFields:
    """Anti-derivatives of (v-V, u-U, h-H) and their derivative arrays."""

    x: np.ndarray
    dx: float
    t: float
    phi: np.ndarray
    psi: np.ndarray
    Psi: np.ndarray
    phi_x: np.ndarray
    psi_x: np.ndarray
    Psi_x: np.ndarray
    phi_xx: np.ndarray
    psi_xx: np.ndarray
    v_x: np.ndarray
    u_x: np.ndarray


@dataclass
class PerturbationTerms:
    """Pointwise nonlinear terms of the perturbation equations."""

    f: np.ndarray
    F: np.ndarray
    G: np.ndarray
    p_rel: np.ndarray
    W: np.ndarray


@dataclass(frozen=True)
class SobolevNorms:
    l2: float
    linf: float
    h1: float
    h2: Optional[float] = None


@dataclass(frozen=True)
class RateFit:
    rate: float
    residual: float
    npoints: int


@dataclass(frozen=True)
class InequalityReport:
    """Max violations (<= 0 means satisfied) of the pointwise inequalities."""

    steepening: float
    f_floor: float

    @property
    def max_violation(self) -> float:
        return max(self.steepening, self.f_floor)


def antiderivatives(state: FieldState, cw: CompositeWave, grid: Grid1D) -> PerturbationFields:
    """Cumulative-trapezoid anti-derivatives of the perturbation from x_lo.

    Raises TruncationError if the perturbation has not decayed below the
    boundary tolerance at the left edge (the anchor of the integrals).
    """
    x = grid.x
    dx = grid.dx
    gas = cw.gas
    flds = cw.fields(x, state.t)
    rv = state.v - flds.V
    ru = state.u - flds.U
    worst = max(abs(float(rv[0])), abs(float(ru[0])))
    if worst > BOUNDARY_DECAY_TOL:
        raise TruncationError(
            f"perturbation {worst:.3e} at x_lo exceeds {BOUNDARY_DECAY_TOL:.0e}")
    phi = cumulative_trapezoid(rv, x, initial=0.0)
    psi = cumulative_trapezoid(ru, x, initial=0.0)
    # h - H with the same central stencil on both sides, so the field
    # vanishes identically at zero perturbation
    h = effective_velocity(gas, state, grid)
    H_disc = effective_velocity(gas, FieldState(state.t, flds.V, flds.U), grid)
    Psi_x = h - H_disc
    Psi = cumulative_trapezoid(Psi_x, x, initial=0.0)
    v_x = np.gradient(state.v, dx, edge_order=2)
    u_x = np.gradient(state.u, dx, edge_order=2)
    return PerturbationFields(x=x, dx=dx, t=state.t, phi=phi, psi=psi, Psi=Psi,
                              phi_x=rv, psi_x=ru, Psi_x=Psi_x,
                              phi_xx=v_x - flds.Vx, psi_xx=u_x - flds.Ux,
                              v_x=v_x, u_x=u_x)


def closed_form_Psi(state: FieldState, cw: CompositeWave, grid: Grid1D,
                    fields: Optional[PerturbationFields] = None) -> np.ndarray:
    """Psi from the exact integral of the v^-(alpha+1) v_x term.

    Psi = psi - ln(v/V) for alpha = 0 and
    Psi = psi + (v^-alpha - V^-alpha)/alpha for alpha > 0, each with its
    value at x_lo subtracted so the anchor matches the quadrature.
    """
    if fields is None:
        fields = antiderivatives(state, cw, grid)
    gas = cw.gas
    V = cw.volume(grid.x, state.t)
    v = state.v
    if gas.alpha == 0.0:
        q = np.log(v / V)
    else:
        q = -(v ** (-gas.alpha) - V ** (-gas.alpha)) / gas.alpha
    return fields.psi - (q - q[0])


def _second_diff(f, dx):
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / dx ** 2
    out[0] = out[1]
    out[-1] = out[-2]
    return out


def sobolev_norms(f, dx: float, order: int = 2) -> SobolevNorms:
    """Discrete L2/Linf/H1 (and H2) norms with central-difference derivatives."""
    f = np.asarray(f, dtype=np.float64)
    if f.size < 5:
        raise ValueError("need at least 5 samples for Sobolev norms")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    l2sq = float(np.trapezoid(f * f, dx=dx))
    linf = float(np.max(np.abs(f)))
    d1 = np.gradient(f, dx, edge_order=2)
    h1sq = l2sq + float(np.trapezoid(d1 * d1, dx=dx))
    h2 = None
    if order == 2:
        d2 = _second_diff(f, dx)
        h2 = math.sqrt(h1sq + float(np.trapezoid(d2 * d2, dx=dx)))
    return SobolevNorms(l2=math.sqrt(l2sq), linf=linf,
                        h1=math.sqrt(h1sq), h2=h2)


def perturbation_terms(state: FieldState, cw: CompositeWave, grid: Grid1D,
                       fields: Optional[PerturbationFields] = None) -> PerturbationTerms:
    """Pointwise f, F, G, p(v|V) and W on the grid.

    f = -p'(V) - (alpha+1) U_x / V^(alpha+2) is positive wherever
    U_x <= 0.  F and G use the same discrete derivatives as the fields
    so both vanish identically at zero perturbation.
    """
    if fields is None:
        fields = antiderivatives(state, cw, grid)
    gas = cw.gas
    ap1 = gas.alpha + 1.0
    flds = cw.fields(grid.x, state.t)
    V, Vx, Ux = flds.V, flds.Vx, flds.Ux
    v = state.v
    dpV = gas.dpressure(V)
    f = -dpV - ap1 * Ux / V ** (gas.alpha + 2.0)
    p_rel = (gas.pressure(v) - gas.pressure(V)) - dpV * fields.phi_x
    # grouped so every term cancels exactly at zero perturbation
    inv_diff = 1.0 / v ** ap1 - 1.0 / V ** ap1
    F = (fields.u_x * inv_diff
         + ((fields.u_x - Ux) - fields.psi_xx) / V ** ap1
         + ap1 * Ux * fields.phi_x / V ** (gas.alpha + 2.0)
         - p_rel)
    G = (fields.v_x * inv_diff
         + ((fields.v_x - Vx) - fields.phi_xx) / V ** ap1
         + ap1 * Vx * fields.phi_x / V ** (gas.alpha + 2.0))
    return PerturbationTerms(f=f, F=F, G=G, p_rel=p_rel, W=flds.W)


def energy_functionals(fields: PerturbationFields, cw: CompositeWave):
    """(E0, E1) = (int phi^2 - Psi^2/p'(V), int phi_x^2 - Psi_x^2/p'(V)).

    Both are nonnegative because p' < 0.
    """
    dpV = cw.gas.dpressure(cw.volume(fields.x, fields.t))
    e0 = float(np.trapezoid(fields.phi ** 2 - fields.Psi ** 2 / dpV, fields.x))
    e1 = float(np.trapezoid(fields.phi_x ** 2 - fields.Psi_x ** 2 / dpV, fields.x))
    return e0, e1


def fit_exponential_rate(t, y, window=None) -> RateFit:
    """Least-squares decay rate of a positive series: y ~ C exp(-rate t).

    Returns the negative slope of the log-linear fit and the rms
    residual of the fit over the (optionally windowed) points.
    """
    t = np.asarray(t, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if window is not None:
        mask = (t >= window[0]) & (t <= window[1])
        t, y = t[mask], y[mask]
    if t.size < 5:
        raise ValueError("need at least 5 points for a rate fit")
    if np.any(y <= 0.0):
        raise ValueError("rate fit requires positive values")
    logs = np.log(y)
    slope, intercept = np.polyfit(t, logs, 1)
    resid = logs - (slope * t + intercept)
    return RateFit(rate=-float(slope),
                   residual=float(np.sqrt(np.mean(resid ** 2))),
                   npoints=int(t.size))


def pointwise_inequality_report(cw: CompositeWave, grid: Grid1D, t: float) -> InequalityReport:
    """Analytic pointwise checks on the composite at time t.

    Wave steepening: (1/p'(V))_t >= min(-s1, s2) |(1/p'(V))_x| with
    V_t = -s1 V1' - s2 V2' taken analytically from the profiles.
    Coefficient floor: -p'(V) - (alpha+1) U_x / (2 V^(alpha+2)) >=
    -max(p'(v_far_left), p'(v_far_right)).

    Reported values are max(rhs - lhs); <= 0 up to rounding means the
    inequality holds.
    """
    gas = cw.gas
    x = grid.x
    flds = cw.fields(x, t)
    V = flds.V
    dp = gas.dpressure(V)
    d2p = gas.d2pressure(V)
    pref = d2p / dp ** 2

    s1 = cw.wave1.s
    lhs = pref * (s1 * flds.V1x)
    speeds = [-s1]
    if cw.wave2 is not None:
        s2 = cw.wave2.s
        lhs = lhs + pref * (s2 * flds.V2x)
        speeds.append(s2)
    rhs = min(speeds) * pref * np.abs(flds.Vx)
    steepening = float(np.max(rhs - lhs))

    floor = -max(gas.dpressure(cw.far_left.v), gas.dpressure(cw.far_right.v))
    lhs2 = -dp - (gas.alpha + 1.0) * flds.Ux / (2.0 * V ** (gas.alpha + 2.0))
    f_floor = float(np.max(floor - lhs2))
    return InequalityReport(steepening=steepening, f_floor=f_floor)


@dataclass
class DiagnosticsRecord:
    """One row of the monitored time series."""

    t: float
    sup_v: float
    sup_u: float
    l2_phi: float
    h1_phi: float
    h2_phi: float
    l2_psi: float
    h1_psi: float
    h2_psi: float
    l2_Psi: float
    l2_Psi_x: float
    l2_W: float
    E0: float
    E1: float
    min_f: float
    ineq_violation: float
    v_min: float
    v_max: float
    p_rel_ratio: float


class DiagnosticsSeries:
    """Append-only list of DiagnosticsRecord with CSV export."""

    def __init__(self):
        self.records: list[DiagnosticsRecord] = []

    def append(self, rec: DiagnosticsRecord):
        self.records.append(rec)

    def __len__(self):
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    def to_csv(self, path):
        with open(path, "w") as f:
            f.write(",".join(DIAG_CSV_COLUMNS) + "\n")
            for r in self.records:
                f.write(",".join("%.17g" % getattr(r, c)
                                 for c in DIAG_CSV_COLUMNS) + "\n")


def _p_rel_ratio(p_rel, phi_x):
    """Max of |p(v|V)| / phi_x^2 over points with non-negligible phi_x."""
    mag = np.abs(phi_x)
    peak = float(mag.max())
    if peak == 0.0:
        return 0.0
    mask = mag >= 1e-6 * peak
    return float(np.max(np.abs(p_rel[mask]) / phi_x[mask] ** 2))


def make_record(state: FieldState, cw: CompositeWave, grid: Grid1D) -> DiagnosticsRecord:
    """Compute the full monitored record for one snapshot in time."""
    fields = antiderivatives(state, cw, grid)
    terms = perturbation_terms(state, cw, grid, fields)
    dx = grid.dx
    nphi = sobolev_norms(fields.phi, dx, order=2)
    npsi = sobolev_norms(fields.psi, dx, order=2)
    e0, e1 = energy_functionals(fields, cw)
    report = pointwise_inequality_report(cw, grid, state.t)
    l2 = lambda f: float(np.sqrt(np.trapezoid(f * f, dx=dx)))
    return DiagnosticsRecord(
        t=state.t,
        sup_v=float(np.max(np.abs(fields.phi_x))),
        sup_u=float(np.max(np.abs(fields.psi_x))),
        l2_phi=nphi.l2, h1_phi=nphi.h1, h2_phi=nphi.h2,
        l2_psi=npsi.l2, h1_psi=npsi.h1, h2_psi=npsi.h2,
        l2_Psi=l2(fields.Psi), l2_Psi_x=l2(fields.Psi_x),
        l2_W=l2(terms.W),
        E0=e0, E1=e1,
        min_f=float(terms.f.min()),
        ineq_violation=report.max_violation,
        v_min=float(state.v.min()), v_max=float(state.v.max()),
        p_rel_ratio=_p_rel_ratio(terms.p_rel, fields.phi_x),
    )
