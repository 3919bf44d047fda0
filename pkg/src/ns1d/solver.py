"""Explicit staggered finite-volume integrator with vacuum handling.

Scheme summary (one Euler stage; steps are Heun averages of two stages):

* mass: first-order upwind flux by face-velocity sign, zero wall flux, so
  total mass telescopes exactly and densities stay nonnegative under the
  advective CFL;
* momentum: donor-cell upwind advection plus central pressure differences
  on face momenta;
* velocity recovery: u = m / rho_face only where rho_face > rho_floor;
  below the floor the face keeps a ghost velocity, refreshed as the linear
  interpolant between the nearest recovered faces and the resting walls
  (the discrete viscous equilibrium of the near-vacuum region);
* viscous update: conservative flux form with a per-cell stress throttle
  d = min(1, rho_face_min*dx^2/(2*dt*mu)).  Wherever the local explicit
  step is stable (d = 1, i.e. everywhere the density is resolved by the
  time step) this is exactly the untreated central viscous term; in the
  stiff near-vacuum band it caps the transmitted stress at the largest
  value a stable explicit update can carry, which keeps the update a flux
  difference (conservation and the momentum-potential identity survive)
  and makes the face update a convex combination (no overshoot at any dt).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import ConfigError, Grid, Params, State, eta, face_density, viscosity
from . import diagnostics as diag
from . import trajectories as traj

# Per-step audit tolerances used by run(); violations are recorded, not fatal.
ENERGY_STEP_TOL = 1e-8      # relative to E(0), per step
MASS_DRIFT_TOL = 1e-12      # relative to initial mass
XI_ETA_DRIFT_TOL = 1e-3     # upward excursion of the particle sup
RHO_CAP_TOL = 1e-3          # relative slack on the density cap
BOUNDARY_GROWTH_WARN = 1e-10  # relative to amplitude


class IntegrationError(RuntimeError):
    """Non-finite field produced during a step."""

    def __init__(self, message, cell_index=None, stage=None):
        super().__init__(message)
        self.cell_index = cell_index
        self.stage = stage


@dataclass(frozen=True)
class InitialProfile:
    """Initial-data recipe.

    ``compact_bump`` is amplitude*(1 - (x/r)^2)_+^k + background, which is
    C^(k-1) at the support edge; ``gaussian_times_cutoff`` multiplies a
    Gaussian of width r/6 by the same cutoff; ``custom_table`` interpolates
    user tables.  Velocities: ``zero``, ``sine_in_support`` (an inward or
    outward sine shaped by the same cutoff so it vanishes with two
    derivatives at the support edge), or a table.
    """

    kind: str = "compact_bump"
    amplitude: float = 1.0
    support_radius: float = 4.0
    smoothness_order: int = 4
    velocity_kind: str = "zero"
    velocity_amplitude: float = 0.5
    background: float = 0.0
    table_x: Optional[np.ndarray] = None
    table_rho: Optional[np.ndarray] = None
    table_u: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in ("compact_bump", "gaussian_times_cutoff", "custom_table"):
            raise ConfigError("unknown profile kind %r" % (self.kind,))
        if self.velocity_kind not in ("zero", "sine_in_support", "custom_table"):
            raise ConfigError("unknown velocity kind %r" % (self.velocity_kind,))
        if self.amplitude < 0.0 or self.support_radius <= 0.0:
            raise ConfigError("profile amplitude must be >= 0 and support_radius > 0")
        if self.smoothness_order < 2:
            raise ConfigError("smoothness_order must be at least 2")
        if self.background < 0.0:
            raise ConfigError("background density must be nonnegative")

    def density(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "custom_table":
            return np.interp(x, self.table_x, self.table_rho)
        s = np.clip(1.0 - (x / self.support_radius) ** 2, 0.0, None)
        cut = s**self.smoothness_order
        if self.kind == "compact_bump":
            return self.amplitude * cut + self.background
        sigma = self.support_radius / 6.0
        return self.amplitude * np.exp(-x * x / (2.0 * sigma * sigma)) * cut + self.background

    def velocity(self, x):
        x = np.asarray(x, dtype=float)
        if self.velocity_kind == "zero":
            return np.zeros_like(x)
        if self.velocity_kind == "custom_table":
            return np.interp(x, self.table_x, self.table_u)
        s = np.clip(1.0 - (x / self.support_radius) ** 2, 0.0, None)
        return (
            self.velocity_amplitude
            * np.sin(np.pi * x / self.support_radius)
            * s**self.smoothness_order
        )


@dataclass(frozen=True)
class CompatibilityReport:
    """Initial-data momentum-balance residual and weighted moments.

    ``g_values`` holds the residual of the stationary momentum balance,
    divided by sqrt(rho0), on faces where the density clears the floor;
    ``weighted_l2`` is its (1 + |x|^(alpha/2))-weighted norm, the quantity
    that must be finite for the initial data to be accepted.
    """

    g_values: np.ndarray
    weighted_l2: float
    max_residual: float
    beta_moment: float
    gamma_moment: float
    velocity_moment: float


def build_initial_data(profile: InitialProfile, grid: Grid, params: Params):
    """Sample the profile on the staggered grid and audit compatibility."""
    rho0 = profile.density(grid.centers)
    u0 = profile.velocity(grid.faces)
    u0[0] = 0.0
    u0[-1] = 0.0
    state = State(t=0.0, rho=rho0, u=u0)

    dx = grid.dx
    mu_c = viscosity(rho0, params.beta)
    tau = mu_c * (u0[1:] - u0[:-1]) / dx
    p = rho0**params.gamma
    residual = np.zeros(grid.n_cells + 1)
    residual[1:-1] = (tau[1:] - tau[:-1]) / dx - (p[1:] - p[:-1]) / dx

    rf = face_density(rho0)
    live = rf > params.rho_floor
    g = np.zeros_like(residual)
    g[live] = residual[live] / np.sqrt(rf[live])
    w = 1.0 + np.abs(grid.faces) ** (params.alpha / 2.0)
    weighted_l2 = float(np.sqrt(np.sum((residual[live] * w[live]) ** 2) * dx))
    dead = ~live
    max_residual = float(np.max(np.abs(residual[dead]))) if dead.any() else 0.0

    wc = np.abs(grid.centers) ** (params.alpha / 2.0)
    rb = np.where(rho0 > 0.0, rho0 ** (params.beta / 2.0), 0.0)
    rg = rho0 ** (params.gamma / 2.0)
    beta_moment = float(np.sqrt(np.sum((wc * rb) ** 2) * dx))
    gamma_moment = float(np.sqrt(np.sum((wc * rg) ** 2) * dx))
    wf = 1.0 + np.abs(grid.faces) ** (params.alpha / 2.0)
    velocity_moment = float(np.sqrt(np.sum(rf * (u0 * wf) ** 2) * dx))

    report = CompatibilityReport(
        g_values=g[live],
        weighted_l2=weighted_l2,
        max_residual=max_residual,
        beta_moment=beta_moment,
        gamma_moment=gamma_moment,
        velocity_moment=velocity_moment,
    )
    if not np.isfinite(weighted_l2):
        raise ConfigError(
            "initial profile rejected: weighted compatibility norm diverges; "
            "the density decays too slowly toward the vacuum boundary for "
            "this smoothness order"
        )
    return state, report


def cfl_dt(state: State, grid: Grid, params: Params) -> float:
    """Stable time increment.

    Advective part: cfl_adv*dx/(|u| + c) with c = sqrt(gamma*rho**(gamma-1)).
    Viscous part: cfl_visc*dx^2*max(rho, kappa)/mu(rho) minimized over
    cells, with kappa = max(rho_floor, visc_ref_frac*max(rho)); densities
    below kappa are protected by the stress throttle in the step instead of
    by the global dt (a dt proportional to the smallest floored density
    would make vacuum runs take ~1e16 steps).
    """
    if not (np.all(np.isfinite(state.rho)) and np.all(np.isfinite(state.u))):
        raise IntegrationError("cfl_dt: state contains non-finite fields")
    rho, u = state.rho, state.u
    dx = grid.dx
    c = np.sqrt(params.gamma * np.maximum(rho, 0.0) ** (params.gamma - 1.0))
    uc = np.maximum(np.abs(u[:-1]), np.abs(u[1:]))
    top = float(np.max(uc + c))
    dt_adv = params.cfl_adv * dx / top if top > 0.0 else np.inf
    kappa = max(params.rho_floor, params.visc_ref_frac * float(rho.max(initial=0.0)))
    dt_visc = params.cfl_visc * dx * dx * float(
        np.min(np.maximum(rho, kappa) / viscosity(rho, params.beta))
    )
    dt = min(dt_adv, dt_visc)
    if not dt > 0.0:
        raise IntegrationError("cfl_dt produced a nonpositive increment")
    return dt


def _euler_stage(rho, u, dt, grid: Grid, params: Params):
    N = rho.size
    dx = grid.dx
    rf = face_density(rho)
    m = rf * u

    # upwind mass flux, zero at walls
    F = np.zeros(N + 1)
    ui = u[1:N]
    F[1:N] = np.where(ui > 0.0, rho[:-1], rho[1:]) * ui
    rho1 = rho - dt / dx * (F[1:] - F[:-1])

    # momentum: donor-cell advection + central pressure
    uc = 0.5 * (u[:-1] + u[1:])
    G = uc * np.where(uc > 0.0, m[:-1], m[1:])
    p = rho**params.gamma
    m1 = m.copy()
    m1[1:N] = m[1:N] + dt * (-(G[1:] - G[:-1]) / dx - (p[1:] - p[:-1]) / dx)

    # velocity recovery with ghost continuation below the floor
    rf1 = face_density(rho1)
    live = rf1 > params.rho_floor
    u1 = np.where(live, m1 / np.maximum(rf1, params.rho_floor), 0.0)
    anchors = live.copy()
    anchors[0] = True
    anchors[-1] = True
    u1[0] = 0.0
    u1[-1] = 0.0
    dead = ~anchors
    if dead.any():
        u1[dead] = np.interp(grid.faces[dead], grid.faces[anchors], u1[anchors])

    # throttled conservative viscous flux
    mu_c = viscosity(rho1, params.beta)
    rf_min = np.minimum(rf1[:-1], rf1[1:])
    d = np.minimum(1.0, rf_min * dx * dx / (2.0 * dt * mu_c))
    tau = d * mu_c * (u1[1:] - u1[:-1]) / dx
    u2 = u1.copy()
    u2[1:N] = u1[1:N] + dt * (tau[1:] - tau[:-1]) / (
        np.maximum(rf1[1:N], params.rho_floor) * dx
    )
    u2[0] = 0.0
    u2[-1] = 0.0
    return rho1, u2


def step(state: State, dt: float, grid: Grid, params: Params) -> State:
    """One Heun step: average of the identity and a twice-advanced stage."""
    r1, u1 = _euler_stage(state.rho, state.u, dt, grid, params)
    _check_finite(r1, u1, stage=1)
    r2, u2 = _euler_stage(r1, u1, dt, grid, params)
    _check_finite(r2, u2, stage=2)
    return State(t=state.t + dt, rho=0.5 * (state.rho + r2), u=0.5 * (state.u + u2))


def _check_finite(rho, u, stage):
    bad = ~np.isfinite(rho)
    if bad.any():
        raise IntegrationError(
            "non-finite density", cell_index=int(np.argmax(bad)), stage=stage
        )
    bad = ~np.isfinite(u)
    if bad.any():
        raise IntegrationError(
            "non-finite velocity", cell_index=int(np.argmax(bad)), stage=stage
        )


@dataclass
class RunSinks:
    """Optional callbacks receiving records and snapshots as they are produced."""

    on_record: Optional[Callable] = None
    on_snapshot: Optional[Callable] = None


@dataclass
class Violation:
    t: float
    step: int
    kind: str
    value: float
    tolerance: float
    message: str


@dataclass
class RunResult:
    final_state: State
    records: list
    violations: list
    warnings: list
    audits: dict
    particles: traj.ParticleSet
    compatibility: CompatibilityReport


def run(params: Params, profile: InitialProfile, sinks: Optional[RunSinks] = None) -> RunResult:
    """Advance from t = 0 to t_end with adaptive dt, monitors and records.

    Deterministic for fixed inputs: the loop is a pure sequence of float
    operations.  Monitors run every step; the full functional suite is
    evaluated every ``diag_every`` steps (always at the first and last).
    Violations of the audited bounds are recorded and reported, never
    raised; a non-finite state aborts with the last good state preserved.
    """
    grid = params.grid()
    state, compat = build_initial_data(profile, grid, params)
    particles = traj.seed_particles(state, grid, params)

    records = []
    violations = []
    warns = []
    dissipation_cum = 0.0
    wdiss_cum = 0.0

    E0 = diag.energy_total(state, grid, params)
    mass0 = float(np.sum(state.rho) * grid.dx)
    boundary0 = max(state.rho[0], state.rho[-1])

    sup0 = particles.initial_sup
    sup_running_min = sup0
    sup_drift = 0.0
    particle_runmin = traj.sample_xi_eta(particles.positions, state, grid, params.beta)
    particle_drift = 0.0
    momentum_bound_sup = traj.momentum_integral_bound(state, grid)
    max_rho_run = float(state.rho.max())
    min_rho_run = float(state.rho.min())
    max_interp_ratio = 0.0
    max_energy_up = 0.0
    energy_identity_residual_sum = 0.0

    history = [state.copy()]  # ring of recent states for time derivatives

    def emit(rec):
        records.append(rec)
        if sinks is not None and sinks.on_record is not None:
            sinks.on_record(rec)

    def snapshot(st, nstep):
        if sinks is not None and sinks.on_snapshot is not None:
            sinks.on_snapshot(st, nstep)

    def make_record(nstep):
        prev = history[-2] if len(history) >= 2 else None
        older = history[-3] if len(history) >= 3 else None
        rec = diag.full_record(
            state,
            grid,
            params,
            prev=prev,
            older=older,
            dissipation_cum=dissipation_cum,
            wdiss_cum=wdiss_cum,
            sup_xi_eta=traj.particle_sup(particles),
        )
        return rec

    def record_and_monitor(nstep):
        nonlocal max_interp_ratio
        if params.weighted_diagnostics:
            ratio = diag.uinf_interpolation_check(state, grid, params)
            max_interp_ratio = max(max_interp_ratio, ratio)
            if ratio > 1.0 + 1e-6:
                violations.append(
                    Violation(state.t, nstep, "interpolation_bound", ratio, 1.0 + 1e-6,
                              "velocity-sup interpolation ratio exceeded 1")
                )
        emit(make_record(nstep))

    record_and_monitor(0)
    snapshot(state, 0)

    nstep = 0
    E_prev = E0
    t_end = params.t_end
    wall0 = time.perf_counter()
    aborted = None
    while state.t < t_end - 1e-14:
        try:
            dt = cfl_dt(state, grid, params)
            remaining = t_end - state.t
            # approach the horizon on equal partitions rather than one stub
            # step: second time differences at the last records need nearly
            # equal spacings to keep their truncation errors cancelling
            if remaining <= 8.0 * dt:
                dt = remaining / math.ceil(remaining / dt)
            D = diag.dissipation_rate(state, grid, params)
            Dw = diag.weighted_dissipation_rate(state, grid, params) if params.weighted_diagnostics else 0.0
            new_state = step(state, dt, grid, params)
        except IntegrationError as err:
            aborted = err
            violations.append(
                Violation(state.t, nstep, "integration_error", np.nan, np.nan, str(err))
            )
            break
        dissipation_cum += dt * D
        wdiss_cum += dt * Dw
        nstep += 1
        state = new_state
        history.append(state.copy())
        if len(history) > 3:
            history.pop(0)

        # particle transport and the transported-potential monitor
        particles = traj.advect_particles(
            particles, state, grid, params, dt, prev_state=history[-2]
        )
        vals = particles.xi_eta
        fin = np.isfinite(vals) & np.isfinite(particle_runmin)
        if fin.any():
            particle_drift = max(particle_drift, float(np.max(vals[fin] - particle_runmin[fin])))
        particle_runmin = np.minimum(particle_runmin, vals)
        sup = traj.particle_sup(particles)
        if np.isfinite(sup):
            sup_drift = max(sup_drift, sup - sup_running_min)
            sup_running_min = min(sup_running_min, sup)

        momentum_bound_sup = max(momentum_bound_sup, traj.momentum_integral_bound(state, grid))
        max_rho_run = max(max_rho_run, float(state.rho.max()))
        min_rho_run = min(min_rho_run, float(state.rho.min()))

        E = diag.energy_total(state, grid, params)
        energy_identity_residual_sum += abs(E - E_prev + dt * D)
        if E - E_prev > max_energy_up:
            max_energy_up = E - E_prev
        if E - E_prev > ENERGY_STEP_TOL * E0 and E0 > 0.0:
            violations.append(
                Violation(state.t, nstep, "energy_increase", E - E_prev,
                          ENERGY_STEP_TOL * E0, "per-step energy increase beyond tolerance")
            )
        E_prev = E

        if max(state.rho[0], state.rho[-1]) - boundary0 > BOUNDARY_GROWTH_WARN * max(
            profile.amplitude, 1e-300
        ):
            if not warns:
                warns.append(
                    "density reached the domain boundary: half_width too small "
                    "for this run"
                )

        if nstep % params.diag_every == 0 or state.t >= t_end - 1e-14:
            record_and_monitor(nstep)
        if params.snapshot_every > 0 and nstep % params.snapshot_every == 0:
            snapshot(state, nstep)

    mass1 = float(np.sum(state.rho) * grid.dx)
    mass_drift = abs(mass1 - mass0) / mass0 if mass0 > 0.0 else abs(mass1)
    if mass_drift > MASS_DRIFT_TOL:
        violations.append(
            Violation(state.t, nstep, "mass_drift", mass_drift, MASS_DRIFT_TOL,
                      "relative mass drift beyond tolerance")
        )
    if sup_drift > XI_ETA_DRIFT_TOL:
        violations.append(
            Violation(state.t, nstep, "xi_eta_sup_growth", sup_drift, XI_ETA_DRIFT_TOL,
                      "transported-potential sup increased beyond tolerance")
        )
    bound = traj.density_bound_monitor(
        particles, state, grid, params, momentum_sup=momentum_bound_sup
    )
    if bound.violated:
        violations.append(
            Violation(state.t, nstep, "density_cap", bound.max_rho,
                      bound.rho_cap * (1.0 + RHO_CAP_TOL),
                      "density exceeded the transported-potential cap")
        )
    if min_rho_run < 0.0:
        violations.append(
            Violation(state.t, nstep, "negative_density", min_rho_run, 0.0,
                      "density went negative")
        )

    if records and records[-1].t < state.t - 1e-14 and aborted is None:
        record_and_monitor(nstep)
    snapshot(state, nstep)

    audits = {
        "steps": nstep,
        "wall_time": time.perf_counter() - wall0,
        "mass_initial": mass0,
        "mass_final": mass1,
        "mass_drift": mass_drift,
        "energy_initial": E0,
        "max_energy_increase": max_energy_up,
        "energy_identity_residual_sum": energy_identity_residual_sum,
        "min_rho": min_rho_run,
        "max_rho": max_rho_run,
        "sup_xi_eta_initial": sup0,
        "sup_xi_eta_drift": sup_drift,
        "particle_drift": particle_drift,
        "rho_cap": bound.rho_cap,
        "momentum_bound_sup": momentum_bound_sup,
        "max_interp_ratio": max_interp_ratio,
        "aborted": str(aborted) if aborted is not None else "",
    }
    return RunResult(
        final_state=state,
        records=records,
        violations=violations,
        warnings=warns,
        audits=audits,
        particles=particles,
        compatibility=compat,
    )
