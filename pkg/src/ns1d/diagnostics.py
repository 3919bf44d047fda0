"""Estimate functionals evaluated on state snapshots.

Each record column shadows one of the a priori bounds satisfied by the
continuum system: conserved totals, the energy/dissipation ledger, first
derivatives of velocity and density powers, the weighted moments that
control the far field, material-derivative norms, the effective viscous
flux, and the time-weighted higher-order functionals.  All quantities use
midpoint quadrature on the staggered grid; fields suffixed ``_l2`` store
L2 norms, the remaining functionals store the integrals themselves.

Time derivatives are formed from snapshot differences so the diagnostics
stay decoupled from the stepper; the second-difference quantities need
three consecutive snapshots and are absent (NaN) on the first records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields as dc_fields

import numpy as np

from .core import ConfigError, Grid, Params, State, alpha_check, face_density, viscosity


@dataclass
class DiagRecord:
    t: float
    mass: float
    momentum: float
    energy: float
    dissipation_cum: float
    max_rho: float
    ux_l2: float
    ux_linf: float
    rho_x_l2: float
    rho_gamma_x_l2: float
    rho_beta_x_l2: float
    rho_u_pow: float
    wmoment: float
    wdiss_cum: float
    rho_ut_l2: float
    uxx_l2: float
    mat_l2: float
    mat_w: float
    udot_x_l2: float
    evf_linf: float
    tw1: float
    tw2: float
    tw3: float
    tw4: float
    sup_xi_eta: float

    def as_tuple(self):
        return tuple(getattr(self, f.name) for f in dc_fields(self))


DIAG_FIELDS = tuple(f.name for f in dc_fields(DiagRecord))


def gradient(field, grid: Grid, order: int = 2) -> np.ndarray:
    """Second-order central differences, one-sided second-order at the ends."""
    if order != 2:
        raise ValueError("only second-order stencils are provided")
    field = np.asarray(field, dtype=float)
    if field.size not in (grid.n_cells, grid.n_cells + 1):
        raise ValueError(
            "field length %d matches neither centers nor faces" % field.size
        )
    return np.gradient(field, grid.dx, edge_order=2)


def staggered_ux(u: np.ndarray, dx: float) -> np.ndarray:
    """Velocity gradient at cells from face differences (the natural one)."""
    return (u[1:] - u[:-1]) / dx


def time_derivative(prev: State, next_state: State):
    """Backward-difference u_t and rho_t between two snapshots."""
    if not next_state.t > prev.t:
        raise ValueError("snapshots must be strictly ordered in time")
    if prev.rho.size != next_state.rho.size:
        raise ValueError("snapshot grids do not match")
    dt = next_state.t - prev.t
    return (next_state.u - prev.u) / dt, (next_state.rho - prev.rho) / dt


def material_derivative(prev: State, next_state: State, grid: Grid) -> np.ndarray:
    """u_t + u u_x at faces, with the centered face gradient for u_x."""
    u_t, _ = time_derivative(prev, next_state)
    u = next_state.u
    return u_t + u * gradient(u, grid)


def effective_viscous_flux(state: State, grid: Grid, params: Params):
    """mu(rho) u_x - rho**gamma at cells, and its max-norm.

    Smoother than either term separately; its boundedness is the hinge of
    the velocity-gradient sup estimate.
    """
    ux = staggered_ux(state.u, grid.dx)
    F = viscosity(state.rho, params.beta) * ux - state.rho**params.gamma
    return F, float(np.abs(F).max())


def _pow_moment(rho, e):
    # moment integrands treat vacuum as contributing nothing, also for e = 0
    return np.where(rho > 0.0, rho**e, 0.0)


def energy_total(state: State, grid: Grid, params: Params) -> float:
    rf = face_density(state.rho)
    kin = 0.5 * np.sum(rf * state.u**2)
    internal = np.sum(state.rho**params.gamma) / (params.gamma - 1.0)
    return float((kin + internal) * grid.dx)


def dissipation_rate(state: State, grid: Grid, params: Params) -> float:
    ux = staggered_ux(state.u, grid.dx)
    return float(np.sum(viscosity(state.rho, params.beta) * ux**2) * grid.dx)


def weighted_dissipation_rate(state: State, grid: Grid, params: Params) -> float:
    ux = staggered_ux(state.u, grid.dx)
    w = np.abs(grid.centers) ** params.alpha
    return float(np.sum(w * viscosity(state.rho, params.beta) * ux**2) * grid.dx)


def first_order_group(state: State, grid: Grid, params: Params) -> dict:
    """Totals, energy, and first-derivative norms of velocity and density powers."""
    dx = grid.dx
    rho, u = state.rho, state.u
    rf = face_density(rho)
    ux = staggered_ux(u, dx)
    out = {
        "mass": float(np.sum(rho) * dx),
        "momentum": float(np.sum(rf * u) * dx),
        "energy": energy_total(state, grid, params),
        "max_rho": float(rho.max(initial=0.0)),
        "ux_l2": math.sqrt(float(np.sum(ux**2) * dx)),
        "ux_linf": float(np.abs(ux).max(initial=0.0)),
        "rho_x_l2": math.sqrt(float(np.sum(gradient(rho, grid) ** 2) * dx)),
        "rho_gamma_x_l2": math.sqrt(
            float(np.sum(gradient(rho**params.gamma, grid) ** 2) * dx)
        ),
        "rho_beta_x_l2": math.sqrt(
            float(np.sum(gradient(rho**params.beta, grid) ** 2) * dx)
        ),
    }
    return out


def weighted_group(state: State, grid: Grid, params: Params) -> dict:
    """Weighted moments: rho |u|^(alpha+2) and |x|^alpha (rho u^2 + rho^gamma + rho^beta)."""
    if not alpha_check(params.alpha).admissible:
        raise ConfigError("weighted diagnostics need an admissible alpha")
    dx = grid.dx
    rho, u = state.rho, state.u
    rf = face_density(rho)
    wf = np.abs(grid.faces) ** params.alpha
    wc = np.abs(grid.centers) ** params.alpha
    rho_u_pow = float(np.sum(rf * np.abs(u) ** (params.alpha + 2.0)) * dx)
    wmoment = float(
        (
            np.sum(wf * rf * u**2)
            + np.sum(wc * (_pow_moment(rho, params.gamma) + _pow_moment(rho, params.beta)))
        )
        * dx
    )
    return {"rho_u_pow": rho_u_pow, "wmoment": wmoment}


def higher_order_group(prev: State, next_state: State, grid: Grid, params: Params,
                       older: State = None) -> dict:
    """Material-derivative, second/third-derivative and time-weighted functionals.

    ``older`` supplies the third snapshot needed for the second time
    difference behind tw2; without it that entry is absent.
    """
    dx = grid.dx
    t = next_state.t
    rho, u = next_state.rho, next_state.u
    rf = face_density(rho)
    mu_c = viscosity(rho, params.beta)
    wf = np.abs(grid.faces) ** params.alpha
    wc_half = np.abs(grid.centers) ** (params.alpha / 2.0)

    u_t, _ = time_derivative(prev, next_state)
    udot = material_derivative(prev, next_state, grid)
    udot_x = staggered_ux(udot, dx)
    uxx = gradient(gradient(u, grid), grid)
    uxxx = gradient(gradient(gradient(u, grid), grid), grid)

    out = {
        "rho_ut_l2": math.sqrt(float(np.sum(rf * u_t**2) * dx)),
        "uxx_l2": math.sqrt(float(np.sum(uxx**2) * dx)),
        "mat_l2": math.sqrt(float(np.sum(rf * udot**2) * dx)),
        "mat_w": float(np.sum(rf * udot**2 * wf) * dx),
        "udot_x_l2": math.sqrt(float(np.sum(udot_x**2) * dx)),
        "tw1": t * float(np.sum(mu_c * udot_x**2) * dx),
        "tw3": t * float(np.sum(mu_c * wc_half * udot_x**2) * dx),
        "tw4": t * float(np.sum(uxxx**2) * dx),
    }
    if older is not None:
        # the two backward-difference derivatives are centered half a step
        # apart on each side; divide by that spacing so a clipped final
        # step does not inflate the second difference
        spacing = 0.5 * (next_state.t - older.t)
        udot_prev = material_derivative(older, prev, grid)
        udot_t = (udot - udot_prev) / spacing
        out["tw2"] = t * t * float(np.sum(rf * udot_t**2) * dx)
    else:
        out["tw2"] = math.nan
    return out


def transport_residuals(prev: State, next_state: State, grid: Grid, params: Params):
    """L2 residuals of the renormalized transport identities for rho^beta, rho^gamma.

    Each power f = rho**e satisfies f_t + u f_x + e f u_x = 0 along the
    continuum flow; the discrete residual shrinks at first order.
    """
    dt = next_state.t - prev.t
    dx = grid.dx
    uc = 0.5 * (next_state.u[:-1] + next_state.u[1:])
    ux = staggered_ux(next_state.u, dx)
    out = []
    for e in (params.beta, params.gamma):
        f0 = prev.rho**e
        f1 = next_state.rho**e
        res = (f1 - f0) / dt + uc * gradient(f1, grid) + e * f1 * ux
        out.append(math.sqrt(float(np.sum(res**2) * dx)))
    return tuple(out)


def uinf_interpolation_check(state: State, grid: Grid, params: Params) -> float:
    """Ratio of ||u||_inf to ||u||_Lp^(1/alpha) ||u_x||_L2^(1-1/alpha), p = 2/(alpha-1).

    The interpolation bound holds with constant 1 for alpha > 2, so the
    discrete ratio stays below 1 up to quadrature tolerance.  Returns 0
    for a vanishing field.
    """
    if not alpha_check(params.alpha).admissible:
        raise ConfigError("interpolation check needs an admissible alpha")
    u = state.u
    linf = float(np.abs(u).max(initial=0.0))
    if linf == 0.0:
        return 0.0
    alpha = params.alpha
    p = 2.0 / (alpha - 1.0)
    lp = float(np.sum(np.abs(u) ** p) * grid.dx) ** (1.0 / p)
    l2 = math.sqrt(float(np.sum(staggered_ux(u, grid.dx) ** 2) * grid.dx))
    rhs = lp ** (1.0 / alpha) * l2 ** (1.0 - 1.0 / alpha)
    return linf / rhs if rhs > 0.0 else 0.0


def full_record(state: State, grid: Grid, params: Params, prev: State = None,
                older: State = None, dissipation_cum: float = 0.0,
                wdiss_cum: float = 0.0, sup_xi_eta: float = math.nan) -> DiagRecord:
    """Assemble one record; history-dependent entries are NaN when unavailable."""
    vals = dict.fromkeys(DIAG_FIELDS, math.nan)
    vals["t"] = state.t
    vals.update(first_order_group(state, grid, params))
    vals["dissipation_cum"] = dissipation_cum
    if params.weighted_diagnostics:
        vals.update(weighted_group(state, grid, params))
        vals["wdiss_cum"] = wdiss_cum
    _, vals["evf_linf"] = effective_viscous_flux(state, grid, params)
    if prev is not None and state.t > prev.t:
        vals.update(higher_order_group(prev, state, grid, params, older=older))
        if not params.weighted_diagnostics:
            vals["mat_w"] = math.nan
            vals["tw3"] = math.nan
    vals["sup_xi_eta"] = sup_xi_eta
    return DiagRecord(**vals)
