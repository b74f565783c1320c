"""Physical parameters, system Hamiltonian and Lindblad dissipator action."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import hilbert
from .hilbert import BasisSpec, OperatorMatrix

GROUND_TAIL_TOL = 1e-12


class ConfigurationError(ValueError):
    """Raised when a cutoff or parameter combination cannot represent the state."""


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless physical parameters plus numerical controls.

    C      : dispersive cooperativity U0/kappa
    c      : detuning parameter, Delta_c = (1 - c) * U0
    kappa  : cavity half-linewidth in units of omega (photon decay rate 2*kappa)
    x_eq   : optical-well position in units of the trap length x_omega
    eta_scaled : pump strength eta / sqrt(omega * kappa)
    """

    C: float
    c: float
    kappa: float
    x_eq: float
    eta_scaled: float
    N_cav: int = 12
    N_mot: int = 15
    dt: float = 1e-4
    t_map: float = 0.05

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.x_eq <= 0:
            raise ValueError("x_eq must be positive")
        if self.eta_scaled < 0:
            raise ValueError("eta_scaled must be non-negative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_map < self.dt:
            raise ValueError("t_map must be >= dt")
        if self.N_cav < 1 or self.N_mot < 1:
            raise ValueError("cutoffs must be >= 1")

    @property
    def U0(self) -> float:
        return self.C * self.kappa

    @property
    def Delta_c(self) -> float:
        return (1.0 - self.c) * self.U0

    @property
    def eta(self) -> float:
        # omega = 1 in code units
        return self.eta_scaled * np.sqrt(self.kappa)

    @property
    def gamma(self) -> float:
        """Pumping parameter gamma = (x_omega/x_eq)^2 eta^2/(omega kappa)."""
        return self.eta_scaled**2 / self.x_eq**2


@dataclass
class SystemOperators:
    """Hamiltonian, jump operator and cached component operators.

    All matrices live on the composite cavity (x) motion basis, with the
    cavity as the first Kronecker factor and the motion restricted to the
    even-Fock subspace.  Immutable after construction.
    """

    params: SystemParams
    cavity_basis: BasisSpec
    motion_dim: int
    H: np.ndarray
    jump: np.ndarray
    a_full: np.ndarray
    number_full: np.ndarray
    x2_full: np.ndarray
    x4_full: np.ndarray
    p2_full: np.ndarray
    f_full: np.ndarray
    delta_eff_full: np.ndarray
    x2_mot: np.ndarray
    euler_gen: np.ndarray = field(repr=False, default=None)  # -iH - 0.5 jump^dag jump

    @property
    def dims(self) -> tuple[int, int]:
        return (self.cavity_basis.dim, self.motion_dim)

    @property
    def dim(self) -> int:
        return self.cavity_basis.dim * self.motion_dim


def build_operators(params: SystemParams, cavity_displacement: complex = 0j) -> SystemOperators:
    """Assemble H, the collapse operator and the cached observable operators.

    H = -(Delta_c I - U0 f(x)) weighted by the photon number, + pump + trap:
        H = -n (x) Delta_eff(x) + i eta (adag - a) (x) I + I (x) (p^2 + x^2)/2
    with Delta_eff(x) = Delta_c - U0 f(x) and the motional part restricted to
    the even-Fock subspace.  A nonzero ``cavity_displacement`` builds every
    cavity operator in the displaced number basis (exact ladder shift).
    """
    if cavity_displacement != 0:
        cav_spec = BasisSpec("displaced-fock", params.N_cav, complex(cavity_displacement))
    else:
        cav_spec = BasisSpec("cavity-fock", params.N_cav)

    a_c = hilbert.annihilation(cav_spec)
    n_c = hilbert.number_operator(cav_spec)
    # i eta (adag - a): assemble in one exact ladder polynomial
    pump_poly: dict[tuple[int, int], complex] = {}
    for (k, l), c in a_c.dagger().ladder_poly.items():
        pump_poly[(k, l)] = pump_poly.get((k, l), 0) + 1j * params.eta * c
    for (k, l), c in a_c.ladder_poly.items():
        pump_poly[(k, l)] = pump_poly.get((k, l), 0) - 1j * params.eta * c
    pump_c = hilbert.ladder_operator(cav_spec, pump_poly)

    mot = hilbert.motional_even_operators(params.N_mot, params.x_eq)
    n_m = params.N_mot
    eye_m = np.eye(n_m)
    eye_c = np.eye(params.N_cav)

    h_mot = 0.5 * (mot["p2"] + mot["x2"])
    _check_motional_cutoff(h_mot)

    delta_eff_m = params.Delta_c * eye_m - params.U0 * mot["f"]

    H = (
        -np.kron(n_c.mat, delta_eff_m)
        + np.kron(pump_c.mat, eye_m)
        + np.kron(eye_c, h_mot)
    )
    a_full = np.kron(a_c.mat, eye_m)
    number_full = np.kron(n_c.mat, eye_m)
    jump = np.sqrt(2.0 * params.kappa) * a_full

    ops = SystemOperators(
        params=params,
        cavity_basis=cav_spec,
        motion_dim=n_m,
        H=H,
        jump=jump,
        a_full=a_full,
        number_full=number_full,
        x2_full=np.kron(eye_c, mot["x2"]),
        x4_full=np.kron(eye_c, mot["x4"]),
        p2_full=np.kron(eye_c, mot["p2"]),
        f_full=np.kron(eye_c, mot["f"]),
        delta_eff_full=np.kron(eye_c, delta_eff_m),
        x2_mot=mot["x2"],
        euler_gen=-1j * H - 0.5 * (jump.conj().T @ jump),
    )
    return ops


def _check_motional_cutoff(h_mot: np.ndarray) -> None:
    if h_mot.shape[0] < 2:
        # single-state motional subspace: deliberate decoupled limit
        return
    vals, vecs = np.linalg.eigh(h_mot)
    ground = vecs[:, 0]
    if abs(ground[-1]) ** 2 > GROUND_TAIL_TOL:
        raise ConfigurationError(
            "motional cutoff too small: trap ground state has trailing population "
            f"{abs(ground[-1])**2:.2e} > {GROUND_TAIL_TOL:.0e}"
        )


def lindblad_apply(ops: SystemOperators, rho: np.ndarray) -> np.ndarray:
    """Action of the Lindblad generator, matrix-free in the superoperator sense.

    Returns -i[H, rho] + kappa (2 a rho adag - {adag a, rho}) with a the full
    cavity annihilation operator; only dim x dim matrix products are formed.
    """
    if rho.shape != ops.H.shape:
        raise ValueError(f"dimension mismatch: rho {rho.shape}, operators {ops.H.shape}")
    b = ops.euler_gen
    j = ops.jump
    return b @ rho + rho @ b.conj().T + (j @ rho) @ j.conj().T
