"""Semiclassical equilibria, effective potential, critical pumping and bifurcations.

Everything here depends on the dimensionless combinations (C, c, gamma) with
gamma = (x_omega/x_eq)^2 eta^2/(omega kappa); positions are in units of the
trap length and energies in units of hbar*omega.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .model import SystemParams

MINIMUM_XTOL = 1e-10


@dataclass(frozen=True)
class ClassicalEquilibrium:
    x_bar: float
    photon_amplitude: complex
    stable: bool
    branch: str  # "center" | "side"


@dataclass
class BifurcationBranch:
    eta_grid: np.ndarray
    minima: list[list[float]]          # all local minima of V per grid point
    global_minimum: np.ndarray         # global minimizer per grid point
    gamma_c0: float
    gamma_cs: Optional[float]
    global_min_switch: Optional[float]  # eta_scaled where the global minimum leaves 0
    transition: str                     # "continuous" | "discontinuous"


def delta_eff(x_bar: float | np.ndarray, params: SystemParams) -> float | np.ndarray:
    f = ((np.asarray(x_bar) / params.x_eq) ** 2 - 1.0) ** 2
    return params.Delta_c - params.U0 * f


def effective_potential(x_bar: float | np.ndarray, params: SystemParams) -> float | np.ndarray:
    """Optical part V_eff = (eta^2/kappa) arctan(-Delta_eff(x)/kappa)."""
    return (params.eta**2 / params.kappa) * np.arctan(-delta_eff(x_bar, params) / params.kappa)


def total_potential(x_bar: float | np.ndarray, params: SystemParams) -> float | np.ndarray:
    """V = V_eff + trap, in units of hbar*omega."""
    x = np.asarray(x_bar)
    return effective_potential(x, params) + 0.5 * x**2


def photon_amplitude(x_bar: float, params: SystemParams) -> complex:
    """Equilibrium cavity amplitude abar = eta / (kappa - i Delta_eff(xbar))."""
    return params.eta / (params.kappa - 1j * delta_eff(x_bar, params))


def mean_photon_semiclassical(x_bar: float, params: SystemParams) -> float:
    """Lowest-order mean photon number eta^2 / (kappa^2 + Delta_eff^2)."""
    d = delta_eff(x_bar, params)
    return params.eta**2 / (params.kappa**2 + d**2)


def _side_quartic_coeffs(C: float, c: float, gamma: float) -> np.ndarray:
    # 1 + C^2 (z^2 - 1 + c)^2 = 4 C gamma z, z = 1 - (x/x_eq)^2
    b = c - 1.0
    return np.array([C**2, 0.0, 2.0 * C**2 * b, -4.0 * C * gamma, C**2 * b**2 + 1.0])


def side_equilibria(params: SystemParams) -> list[ClassicalEquilibrium]:
    """Side equilibria from the quartic in z = 1 - (xbar/x_eq)^2.

    Real roots with 0 < z < 1 are kept; the positive representative of each
    +-xbar pair is reported.  Side solutions are stable whenever they exist.
    Roots are found with companion-matrix polynomial root finding, which is
    robust near the double root at the fold.
    """
    roots = np.roots(_side_quartic_coeffs(params.C, params.c, params.gamma))
    out = []
    for z in roots:
        if abs(z.imag) > 1e-9:
            continue
        z = z.real
        if not (0.0 < z < 1.0):
            continue
        x_bar = params.x_eq * np.sqrt(1.0 - z)
        out.append(
            ClassicalEquilibrium(
                x_bar=x_bar,
                photon_amplitude=photon_amplitude(x_bar, params),
                stable=True,
                branch="side",
            )
        )
    out.sort(key=lambda e: e.x_bar)
    return out


def center_critical_gamma(params: SystemParams) -> float:
    """Pumping at which the center equilibrium destabilizes: (1 + c^2 C^2)/(4C)."""
    return (1.0 + params.c**2 * params.C**2) / (4.0 * params.C)


def side_critical_gamma(params: SystemParams) -> Optional[float]:
    """Pumping at which side equilibria appear (fold of the side quartic).

    For c = 1 the closed form 1/(3^{3/4} sqrt(C)) applies.  Otherwise the fold
    is the simultaneous solution of the quartic and of z(z^2 + c - 1) = gamma/C
    for z in (0, 1); if no such fold exists the transition is continuous and
    None is returned.
    """
    C, c = params.C, params.c
    if c == 1.0:
        return 1.0 / (3.0**0.75 * np.sqrt(C))

    def fold_fn(z):
        # quartic with gamma eliminated through the fold condition
        return 1.0 + C**2 * (z**2 - 1.0 + c) ** 2 - 4.0 * C**2 * z**2 * (z**2 + c - 1.0)

    zs = np.linspace(1e-9, 1.0 - 1e-9, 4001)
    vals = fold_fn(zs)
    candidates = []
    for i in range(len(zs) - 1):
        if vals[i] == 0.0:
            candidates.append(zs[i])
        elif vals[i] * vals[i + 1] < 0:
            candidates.append(brentq(fold_fn, zs[i], zs[i + 1], xtol=1e-14))
    gammas = [C * z * (z**2 + c - 1.0) for z in candidates]
    gammas = [g for g in gammas if g > 0]
    if not gammas:
        return None
    return min(gammas)


def transition_type(C: float, c: float) -> str:
    """Discontinuous iff c in (0, 4) and C > C_crit = 1/sqrt(c(4-c))."""
    if not (0.0 < c < 4.0):
        return "continuous"
    return "discontinuous" if C > 1.0 / np.sqrt(c * (4.0 - c)) else "continuous"


def _local_minima(params: SystemParams) -> list[float]:
    """All local minima of V on [0, x_eq], seeded at 0 and at the quartic roots.

    The quartic roots are the side stationary points (minima and maxima);
    each seed is classified by its curvature and minima are polished with a
    bracketed 1-D search in a narrow window around the seed.
    """

    def v(x):
        return float(total_potential(x, params))

    h = 1e-5
    minima: list[float] = []

    # center branch: x = 0 is stationary by symmetry
    if v(h) - v(0.0) > 0:
        minima.append(0.0)

    w = 0.02 * params.x_eq
    for eq in side_equilibria(params):
        s = eq.x_bar
        d2 = (v(s + h) - 2 * v(s) + v(s - h)) / h**2
        if d2 <= 0:
            continue
        res = minimize_scalar(
            v,
            bounds=(max(0.0, s - w), min(params.x_eq, s + w)),
            method="bounded",
            options={"xatol": MINIMUM_XTOL},
        )
        x_star = float(res.x)
        if all(abs(x_star - m) > 1e-6 * max(1.0, params.x_eq) for m in minima):
            minima.append(x_star)
    minima.sort()
    return minima


def _params_at_eta(params: SystemParams, eta_scaled: float) -> SystemParams:
    from dataclasses import replace

    return replace(params, eta_scaled=eta_scaled)


def _global_minimum(params: SystemParams) -> float:
    minima = _local_minima(params)
    if not minima:
        return 0.0
    vs = [float(total_potential(x, params)) for x in minima]
    v0 = min(vs)
    # ties broken toward the center branch: smallest x among equal-V minima
    for x, vx in zip(minima, vs):
        if vx <= v0 + 1e-12 * max(1.0, abs(v0)):
            return x
    return minima[int(np.argmin(vs))]


def bifurcation_scan(params: SystemParams, eta_grid: np.ndarray) -> BifurcationBranch:
    """Stable branches and the global-minimum switch over a monotone eta grid."""
    eta_grid = np.asarray(eta_grid, dtype=float)
    if len(eta_grid) > 1 and not (np.all(np.diff(eta_grid) > 0) or np.all(np.diff(eta_grid) < 0)):
        raise ValueError("eta_grid must be monotone")

    minima = []
    glob = np.empty(len(eta_grid))
    for i, eta in enumerate(eta_grid):
        p = _params_at_eta(params, eta)
        minima.append(_local_minima(p))
        glob[i] = _global_minimum(p)

    gamma_c0 = center_critical_gamma(params)
    gamma_cs = side_critical_gamma(params)
    switch = None
    tol = 1e-6 * params.x_eq
    off_center = np.nonzero(glob > tol)[0]
    if off_center.size:
        i1 = off_center[0]
        if i1 == 0:
            switch = float(eta_grid[0])
        else:
            lo, hi = float(eta_grid[i1 - 1]), float(eta_grid[i1])
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if _global_minimum(_params_at_eta(params, mid)) > tol:
                    hi = mid
                else:
                    lo = mid
            switch = 0.5 * (lo + hi)

    return BifurcationBranch(
        eta_grid=eta_grid,
        minima=minima,
        global_minimum=glob,
        gamma_c0=gamma_c0,
        gamma_cs=gamma_cs,
        global_min_switch=switch,
        transition=transition_type(params.C, params.c),
    )


def gamma_to_eta_scaled(gamma: float, x_eq: float) -> float:
    """Convert the pumping parameter gamma to eta/sqrt(omega*kappa)."""
    return x_eq * np.sqrt(gamma)
