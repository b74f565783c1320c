"""Steady-state observables: moments, Husimi functions, entropies, negativity,
mutual information, Gaussian moments, Wehrl entropy, non-Gaussianity and the
positive-semi-axis projection of the motional state."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import hilbert
from .model import SystemOperators

ENTROPY_EIG_CLIP = 1e-14
QUADRATURE_NORM_TOL = 1e-3


class QuadratureError(RuntimeError):
    """Husimi grid too coarse or too small for the requested integral."""


class NumericalStateError(RuntimeError):
    """State violates a physical constraint beyond numerical tolerance."""


# ---------------------------------------------------------------------------
# reductions and mean values


def reduce_cavity(rho: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    nc, nm = dims
    return np.einsum("imjm->ij", rho.reshape(nc, nm, nc, nm))


def reduce_motion(rho: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    nc, nm = dims
    return np.einsum("imin->mn", rho.reshape(nc, nm, nc, nm))


def expectation(op: np.ndarray, rho: np.ndarray) -> float:
    return float(np.trace(op @ rho).real)


def basic_means(rho_ss: np.ndarray, ops: SystemOperators) -> dict[str, float]:
    """Mean values behind the transition plots.

    Keys: n_photon, delta_eff_mean (= <Delta_eff>/U0), x2_mean (= <x^2>/x_eq^2),
    x2_dispersion (= sqrt(<x^4> - <x^2>^2)/x_eq^2), kinetic (= <p^2>/2, hbar*omega).
    """
    p = ops.params
    x2 = expectation(ops.x2_full, rho_ss)
    x4 = expectation(ops.x4_full, rho_ss)
    return {
        "n_photon": expectation(ops.number_full, rho_ss),
        "delta_eff_mean": expectation(ops.delta_eff_full, rho_ss) / p.U0,
        "x2_mean": x2 / p.x_eq**2,
        "x2_dispersion": np.sqrt(max(x4 - x2**2, 0.0)) / p.x_eq**2,
        "kinetic": 0.5 * expectation(ops.p2_full, rho_ss),
    }


# ---------------------------------------------------------------------------
# Husimi distribution and Wehrl entropy


@dataclass
class HusimiGrid:
    """Q(alpha) = <alpha|rho|alpha> sampled on a square grid in alpha."""

    re_axis: np.ndarray
    im_axis: np.ndarray
    values: np.ndarray          # shape (len(im_axis), len(re_axis))
    support_warning: bool = False

    @property
    def cell_area(self) -> float:
        return (self.re_axis[1] - self.re_axis[0]) * (self.im_axis[1] - self.im_axis[0])


def coherent_vector(dim: int, alpha: complex) -> np.ndarray:
    """Fock coefficients of |alpha> truncated to dim levels."""
    v = np.empty(dim, dtype=complex)
    v[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, dim):
        v[n] = v[n - 1] * alpha / np.sqrt(n)
    return v


def husimi(
    rho_reduced: np.ndarray,
    center: complex = 0j,
    halfwidth: float = 4.0,
    resolution: int = 201,
) -> HusimiGrid:
    """Husimi distribution of a single-mode state, Q normalized to pi.

    The phase-space coordinate is alpha = (q + i p)/sqrt(2) in dimensionless
    quadratures.  A support warning is raised (non-fatally) when the grid
    reaches coherent amplitudes with |alpha|^2 beyond half the Fock cutoff.
    """
    dim = rho_reduced.shape[0]
    re = np.linspace(center.real - halfwidth, center.real + halfwidth, resolution)
    im = np.linspace(center.imag - halfwidth, center.imag + halfwidth, resolution)
    alphas = (re[None, :] + 1j * im[:, None]).reshape(-1)

    # columns of M are coherent vectors
    m = np.empty((dim, alphas.size), dtype=complex)
    m[0] = np.exp(-0.5 * np.abs(alphas) ** 2)
    for n in range(1, dim):
        m[n] = m[n - 1] * alphas / np.sqrt(n)

    q = np.einsum("np,nm,mp->p", m.conj(), rho_reduced, m).real
    warn = bool(np.max(np.abs(alphas)) ** 2 > 0.5 * dim)
    return HusimiGrid(re, im, q.reshape(len(im), len(re)), support_warning=warn)


def wehrl_entropy(grid: HusimiGrid) -> float:
    """H_W = -(1/pi) sum Q log Q dA by midpoint quadrature, 0 log 0 = 0."""
    da = grid.cell_area
    q = grid.values
    norm = q.sum() * da / np.pi
    if abs(norm - 1.0) > QUADRATURE_NORM_TOL:
        raise QuadratureError(
            f"Husimi grid normalization off by {abs(norm - 1.0):.2e}; refine or enlarge the grid"
        )
    mask = q > 0
    return float(-(q[mask] * np.log(q[mask])).sum() * da / np.pi)


# ---------------------------------------------------------------------------
# entropies and correlations


def von_neumann_entropy(rho: np.ndarray) -> float:
    """S = -tr(rho log rho) in nats; negative eigenvalues are clipped at 0."""
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    lam = lam[lam > ENTROPY_EIG_CLIP]
    return float(-(lam * np.log(lam)).sum())


def log_negativity(rho_ss: np.ndarray, dims: tuple[int, int], transpose: str = "motion") -> float:
    """E_N = log2(1 + 2 sum_j |lambda_j|) over the negative eigenvalues of the
    partial transposition (raw spectrum, no clipping)."""
    nc, nm = dims
    r = rho_ss.reshape(nc, nm, nc, nm)
    if transpose == "motion":
        rt = r.transpose(0, 3, 2, 1)
    elif transpose == "cavity":
        rt = r.transpose(2, 1, 0, 3)
    else:
        raise ValueError("transpose must be 'motion' or 'cavity'")
    lam = np.linalg.eigvalsh(rt.reshape(nc * nm, nc * nm))
    neg = lam[lam < 0]
    return float(np.log2(1.0 + 2.0 * np.abs(neg).sum()))


def mutual_information(rho_ss: np.ndarray, dims: tuple[int, int]) -> float:
    """I = S(rho_cav) + S(rho_mot) - S(rho), entropies in nats."""
    return (
        von_neumann_entropy(reduce_cavity(rho_ss, dims))
        + von_neumann_entropy(reduce_motion(rho_ss, dims))
        - von_neumann_entropy(rho_ss)
    )


# ---------------------------------------------------------------------------
# Gaussian moments and non-Gaussianity


@dataclass
class MomentData:
    first_moments: np.ndarray   # (q, p)
    covariance: np.ndarray      # 2x2 symmetric

    @property
    def mean_occupation(self) -> float:
        # second moments about the origin: <n> = (<q^2> + <p^2> - 1)/2
        p, s = self.first_moments, self.covariance
        return 0.5 * (s[0, 0] + s[1, 1] + p @ p - 1.0)


SYMPLECTIC_FORM = np.array([[0.0, 1.0], [-1.0, 0.0]])
UNCERTAINTY_TOL = 1e-6


def _quadrature_squares(dim: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    spec = hilbert.BasisSpec("cavity-fock", dim + 2)
    q, p = hilbert.quadratures(spec)
    q2 = (q.mat @ q.mat)[:dim, :dim]
    p2 = (p.mat @ p.mat)[:dim, :dim]
    qp = (0.5 * (q.mat @ p.mat + p.mat @ q.mat))[:dim, :dim]
    return q.mat[:dim, :dim], p.mat[:dim, :dim], q2, p2, qp


def gaussian_moments(rho_reduced: np.ndarray) -> MomentData:
    """First moments and covariance matrix of a single-mode state."""
    dim = rho_reduced.shape[0]
    q, p, q2, p2, qp = _quadrature_squares(dim)
    mq = expectation(q, rho_reduced)
    mp = expectation(p, rho_reduced)
    sqq = expectation(q2, rho_reduced) - mq * mq
    spp = expectation(p2, rho_reduced) - mp * mp
    sqp = expectation(qp, rho_reduced) - mq * mp
    sigma = np.array([[sqq, sqp], [sqp, spp]])
    if np.linalg.eigvalsh(sigma + 0.5j * SYMPLECTIC_FORM).min() < -UNCERTAINTY_TOL:
        raise NumericalStateError("covariance matrix violates the uncertainty relation")
    return MomentData(np.array([mq, mp]), sigma)


def gaussian_husimi(moments: MomentData, re_axis: np.ndarray, im_axis: np.ndarray) -> HusimiGrid:
    """Analytic Husimi function of the Gaussian state with the given moments.

    Q_G is a normal distribution in (q, p) = (sqrt2 Re a, sqrt2 Im a) with
    covariance sigma + I/2, normalized to pi like the numeric Husimi grids.
    """
    gamma = moments.covariance + 0.5 * np.eye(2)
    inv = np.linalg.inv(gamma)
    amp = 1.0 / np.sqrt(np.linalg.det(gamma))
    qg = np.sqrt(2.0) * re_axis[None, :] - moments.first_moments[0]
    pg = np.sqrt(2.0) * im_axis[:, None] - moments.first_moments[1]
    expo = inv[0, 0] * qg**2 + 2.0 * inv[0, 1] * qg * pg + inv[1, 1] * pg**2
    return HusimiGrid(re_axis, im_axis, amp * np.exp(-0.5 * expo))


def default_grid(moments: MomentData, resolution: int = 201, min_halfwidth: float = 4.0):
    """Grid centered at the first moments, half-width max(4, 1.5 sqrt(2 nbar + 1))."""
    center = (moments.first_moments[0] + 1j * moments.first_moments[1]) / np.sqrt(2.0)
    nbar = max(moments.mean_occupation, 0.0)
    halfwidth = max(min_halfwidth, 1.5 * np.sqrt(2.0 * nbar + 1.0))
    return center, halfwidth


def non_gaussianity(
    rho_reduced: np.ndarray,
    resolution: int = 201,
    halfwidth: Optional[float] = None,
) -> float:
    """Wehrl-entropy deficit vs the Gaussian state with identical moments.

    The Gaussian reference entropy is evaluated from its analytic Husimi
    function sampled on the same grid as the state's, so the quadrature bias
    cancels in the difference.
    """
    moments = gaussian_moments(rho_reduced)
    center, auto_hw = default_grid(moments, resolution)
    hw = halfwidth if halfwidth is not None else auto_hw
    grid = husimi(rho_reduced, center, hw, resolution)
    ref = gaussian_husimi(moments, grid.re_axis, grid.im_axis)
    return wehrl_entropy(ref) - wehrl_entropy(grid)


# ---------------------------------------------------------------------------
# positive-semi-axis projection


def embed_even_state(rho_even: np.ndarray, full_dim: Optional[int] = None) -> np.ndarray:
    """Embed an even-Fock-subspace state into the full motional Fock basis."""
    n_even = rho_even.shape[0]
    if full_dim is None:
        full_dim = 2 * n_even
    idx = 2 * np.arange(n_even)
    if idx[-1] >= full_dim:
        raise ValueError("full_dim too small to hold the even-subspace state")
    out = np.zeros((full_dim, full_dim), dtype=complex)
    out[np.ix_(idx, idx)] = rho_even
    return out


def _oscillator_wavefunctions(n_max: int, x: np.ndarray) -> np.ndarray:
    """phi_n(x) for n < n_max via the stable three-term recurrence."""
    phi = np.empty((n_max, x.size))
    phi[0] = np.pi**-0.25 * np.exp(-0.5 * x**2)
    if n_max > 1:
        phi[1] = np.sqrt(2.0) * x * phi[0]
    for n in range(2, n_max):
        phi[n] = np.sqrt(2.0 / n) * x * phi[n - 1] - np.sqrt((n - 1) / n) * phi[n - 2]
    return phi


def half_axis_operator(dim: int, quad_order: int = 600) -> np.ndarray:
    """Fock-truncated positive-half-axis operator <m|P+|n> = int_0^inf phi_m phi_n.

    Built at the doubled cutoff 2*dim and truncated, so the retained block is
    free of edge corruption; the truncation makes P+ non-idempotent.
    """
    build_dim = 2 * dim
    x_max = np.sqrt(2.0 * build_dim + 1.0) + 6.0
    nodes, weights = leggauss(quad_order)
    x = 0.5 * x_max * (nodes + 1.0)
    w = 0.5 * x_max * weights
    phi = _oscillator_wavefunctions(build_dim, x)
    pp = (phi * w) @ phi.T
    return pp[:dim, :dim]


def project_positive(rho_motion: np.ndarray, quad_order: int = 600) -> np.ndarray:
    """P+ rho P+ / tr(P+ rho P+) for a full-Fock-basis motional state."""
    dim = rho_motion.shape[0]
    pp = half_axis_operator(dim, quad_order)
    projected = pp @ rho_motion @ pp
    tr = np.trace(projected).real
    if tr < 1e-10:
        raise NumericalStateError("degenerate projection: tr(P+ rho P+) < 1e-10")
    return projected / tr
