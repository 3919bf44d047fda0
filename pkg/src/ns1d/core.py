"""Domain types and closures shared by the solver, diagnostics and monitors.

The fluid model: isentropic pressure P(rho) = rho**gamma (gamma > 1) and a
density-dependent viscosity mu(rho) = 1 + rho**beta (beta >= 0), so the
viscous operator never degenerates at vacuum.  The spatial weight exponent
``alpha`` used by the weighted monitors must lie in a narrow admissible
window whose endpoints come from the interpolation algebra implemented in
:func:`alpha_check`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Upper endpoint of the admissible alpha window, 1 + 2/cbrt(1 + cbrt(4)),
# evaluated once in extended precision and stored to 15 significant digits.
ALPHA_UPPER = 2.45682956183656


class ConfigError(ValueError):
    """Invalid configuration value or constraint violation."""


def pressure(rho, gamma):
    """Isentropic pressure rho**gamma.  Monotone increasing, 0 at vacuum."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0.0):
        raise ValueError("pressure: negative density")
    return rho**gamma


def viscosity(rho, beta):
    """Viscosity coefficient 1 + rho**beta, always >= 1.

    The convention 0**0 = 1 applies, so beta = 0 gives the uniform
    coefficient 2 everywhere including vacuum.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0.0):
        raise ValueError("viscosity: negative density")
    return 1.0 + rho**beta


def eta(rho, beta):
    """Transported viscosity potential, the integral of mu(s)/s from 1 to rho.

    Closed forms: log(rho) + (rho**beta - 1)/beta for beta > 0, and
    2*log(rho) for beta = 0.  Strictly increasing in rho.  Nonpositive
    densities map to -inf; sup-type monitors skip those entries.
    """
    r = np.asarray(rho, dtype=float)
    out = np.full(r.shape, -np.inf)
    pos = r > 0.0
    if beta > 0.0:
        out[pos] = np.log(r[pos]) + (r[pos] ** beta - 1.0) / beta
    else:
        out[pos] = 2.0 * np.log(r[pos])
    if np.isscalar(rho) or np.ndim(rho) == 0:
        return float(out)
    return out


def eta_inverse(value, beta, hi=None):
    """Solve eta(rho) = value for rho > 0 (eta is strictly increasing)."""
    from scipy.optimize import brentq

    if not np.isfinite(value):
        raise ValueError("eta_inverse: value must be finite")
    lo = 1e-300
    if hi is None:
        hi = 10.0
        while eta(hi, beta) < value:
            hi *= 10.0
            if hi > 1e300:
                raise ValueError("eta_inverse: value out of range")
    return brentq(lambda r: eta(r, beta) - value, lo, hi, xtol=1e-14, rtol=1e-14)


@dataclass(frozen=True)
class AlphaReport:
    """Admissibility report for the spatial weight exponent."""

    alpha: float
    admissible: bool
    theta: float
    coeff: float
    upper_bound: float = ALPHA_UPPER


def alpha_check(alpha: float) -> AlphaReport:
    """Check 2 < alpha < 1 + 2/cbrt(1 + cbrt(4)) and report the algebra.

    theta = (2*alpha - 1)/(3*alpha) is the interpolation exponent used by
    the weighted bounds; coeff = alpha*(alpha - 1)**3/8 must stay below 1
    for the weighted energy absorption to close.  Both are guaranteed on
    the admissible interval.
    """
    alpha = float(alpha)
    theta = (2.0 * alpha - 1.0) / (3.0 * alpha) if alpha != 0.0 else np.inf
    coeff = alpha * (alpha - 1.0) ** 3 / 8.0
    admissible = 2.0 < alpha < ALPHA_UPPER
    return AlphaReport(alpha=alpha, admissible=admissible, theta=theta, coeff=coeff)


@dataclass(frozen=True)
class Grid:
    """Uniform staggered grid on [-L, L]: densities at centers, velocities at faces."""

    centers: np.ndarray
    faces: np.ndarray
    dx: float

    @property
    def n_cells(self) -> int:
        return self.centers.size

    @property
    def half_width(self) -> float:
        return float(self.faces[-1])


def make_grid(half_width: float, n_cells: int) -> Grid:
    """Build the uniform staggered grid; faces span [-L, L] exactly."""
    if half_width <= 0.0:
        raise ConfigError("half_width must be positive")
    if n_cells < 8:
        raise ConfigError("n_cells must be at least 8")
    dx = 2.0 * half_width / n_cells
    faces = -half_width + dx * np.arange(n_cells + 1)
    faces[-1] = half_width
    centers = 0.5 * (faces[:-1] + faces[1:])
    return Grid(centers=centers, faces=faces, dx=dx)


def face_density(rho: np.ndarray) -> np.ndarray:
    """Arithmetic-mean density at faces; wall faces mirror the adjacent cell."""
    rf = np.empty(rho.size + 1)
    rf[1:-1] = 0.5 * (rho[:-1] + rho[1:])
    rf[0] = rho[0]
    rf[-1] = rho[-1]
    return rf


@dataclass
class State:
    """Discrete fields at one instant: cell densities and face velocities."""

    t: float
    rho: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if self.u.size != self.rho.size + 1:
            raise ValueError("State: u must have one more entry than rho")

    @property
    def m(self) -> np.ndarray:
        """Face momenta, derived as face density times velocity."""
        return face_density(self.rho) * self.u

    def validate(self):
        if not np.all(np.isfinite(self.rho)) or not np.all(np.isfinite(self.u)):
            raise ValueError("State contains non-finite fields")
        if np.any(self.rho < 0.0):
            raise ValueError("State has negative density")
        if self.u[0] != 0.0 or self.u[-1] != 0.0:
            raise ValueError("State boundary velocities must vanish")

    def copy(self) -> "State":
        return State(t=self.t, rho=self.rho.copy(), u=self.u.copy())


@dataclass(frozen=True)
class Params:
    """Physical and numerical configuration for a run.

    ``rho_floor`` is the face-density cutoff below which velocities are not
    recovered by division; ``visc_ref_frac`` sets the density scale the
    viscous time-step restriction is referenced to (see solver notes on the
    stress throttle for why near-vacuum cells do not set the global dt).
    """

    gamma: float = 2.0
    beta: float = 1.0
    alpha: float = 2.3
    half_width: float = 10.0
    n_cells: int = 1024
    cfl_adv: float = 0.4
    cfl_visc: float = 0.25
    rho_floor: float = 1e-8
    t_end: float = 1.0
    snapshot_every: int = 0
    diag_every: int = 1
    visc_ref_frac: float = 0.25
    weighted_diagnostics: bool = True

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ConfigError("gamma must exceed 1")
        if self.beta < 0.0:
            raise ConfigError("beta must be nonnegative")
        if self.half_width <= 0.0:
            raise ConfigError("half_width must be positive")
        if self.n_cells < 8:
            raise ConfigError("n_cells must be at least 8")
        if not 0.0 < self.cfl_adv <= 1.0:
            raise ConfigError("cfl_adv must lie in (0, 1]")
        if not 0.0 < self.cfl_visc <= 0.5:
            raise ConfigError("cfl_visc must lie in (0, 0.5]")
        if self.rho_floor <= 0.0:
            raise ConfigError("rho_floor must be positive")
        if self.t_end < 0.0:
            raise ConfigError("t_end must be nonnegative")
        if self.diag_every < 1:
            raise ConfigError("diag_every must be at least 1")
        if not 0.0 <= self.visc_ref_frac <= 1.0:
            raise ConfigError("visc_ref_frac must lie in [0, 1]")
        if self.weighted_diagnostics:
            rep = alpha_check(self.alpha)
            if not rep.admissible:
                raise ConfigError(
                    "alpha = %g rejected: weighted diagnostics require "
                    "2 < alpha < %.15g (strict bounds)" % (self.alpha, ALPHA_UPPER)
                )

    def grid(self) -> Grid:
        return make_grid(self.half_width, self.n_cells)
