"""Truncated Fock bases and the elementary operators built on them.

Code units: hbar = m = omega = 1, so the trap length x_omega = 1 and all
positions, momenta and energies are dimensionless.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

HERMITICITY_TOL = 1e-12

BASIS_KINDS = ("cavity-fock", "motional-fock", "motional-even-fock", "displaced-fock")


@dataclass(frozen=True)
class BasisSpec:
    """A truncated single-mode basis.

    For ``motional-even-fock`` the basis index k labels the Fock state 2k,
    so the retained Fock numbers are {0, 2, ..., 2(dim-1)}.
    """

    kind: str
    dim: int
    displacement: complex = 0j

    def __post_init__(self):
        if self.kind not in BASIS_KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("basis dimension must be >= 1")
        if self.kind != "displaced-fock" and self.displacement != 0:
            raise ValueError("only displaced-fock bases carry a displacement")


@dataclass
class OperatorMatrix:
    """A complex matrix tagged with the basis (or basis pair) it lives on.

    ``ladder_poly`` optionally records the operator as a normal-ordered
    polynomial {(k, l): coeff} meaning sum_kl coeff * adag^k a^l.  Operators
    carrying this tag can be rebased exactly to a displaced number basis.
    """

    basis: BasisSpec | tuple[BasisSpec, BasisSpec]
    mat: np.ndarray
    ladder_poly: Optional[dict[tuple[int, int], complex]] = None

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def dagger(self) -> "OperatorMatrix":
        poly = None
        if self.ladder_poly is not None:
            poly = {(l, k): np.conj(c) for (k, l), c in self.ladder_poly.items()}
        return OperatorMatrix(self.basis, self.mat.conj().T.copy(), poly)

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return np.max(np.abs(self.mat - self.mat.conj().T)) < tol


def _ladder_block(i: int, j: int, dim: int) -> np.ndarray:
    """Exact matrix of adag^i a^j on an untruncated Fock space, cut to dim."""
    m = np.zeros((dim, dim), dtype=complex)
    for n in range(j, dim):
        row = n - j + i
        if row >= dim:
            continue
        # sqrt(n!/(n-j)!) * sqrt((n-j+i)!/(n-j)!)
        val = 1.0
        for t in range(n - j + 1, n + 1):
            val *= t
        for t in range(n - j + 1, n - j + i + 1):
            val *= t
        m[row, n] = np.sqrt(val)
    return m


def ladder_operator(spec: BasisSpec, poly: dict[tuple[int, int], complex]) -> OperatorMatrix:
    """Build sum_kl c_kl adag^k a^l with entries exact at the truncation.

    The matrix elements are those of the untruncated operator restricted to
    the first ``dim`` Fock states, so no edge corruption from truncated
    matrix products enters.
    """
    mat = np.zeros((spec.dim, spec.dim), dtype=complex)
    for (k, l), c in poly.items():
        mat += c * _ladder_block(k, l, spec.dim)
    return OperatorMatrix(spec, mat, dict(poly))


def annihilation(spec: BasisSpec) -> OperatorMatrix:
    """Annihilation operator a in the (possibly displaced) number basis.

    In a basis displaced by alpha the matrix of the physical a is a + alpha*I
    (exact displacement identity D^dag(a) a D(a) = a + alpha).
    """
    poly: dict[tuple[int, int], complex] = {(0, 1): 1.0}
    if spec.kind == "displaced-fock" and spec.displacement != 0:
        poly[(0, 0)] = complex(spec.displacement)
    return ladder_operator(spec, poly)


def number_operator(spec: BasisSpec) -> OperatorMatrix:
    """Photon/phonon number operator adag a of the physical mode.

    In a displaced basis this is (adag + conj(alpha))(a + alpha), built
    exactly in normal order.
    """
    a = complex(spec.displacement) if spec.kind == "displaced-fock" else 0j
    poly: dict[tuple[int, int], complex] = {(1, 1): 1.0}
    if a != 0:
        poly[(1, 0)] = a
        poly[(0, 1)] = np.conj(a)
        poly[(0, 0)] = abs(a) ** 2
    return ladder_operator(spec, poly)


def quadratures(spec: BasisSpec) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Dimensionless quadratures q = (a + adag)/sqrt2, p = i(adag - a)/sqrt2."""
    if spec.dim < 2:
        raise ValueError("quadratures need dim >= 2")
    s = 1.0 / np.sqrt(2.0)
    a = complex(spec.displacement) if spec.kind == "displaced-fock" else 0j
    q = ladder_operator(spec, {(0, 1): s, (1, 0): s, (0, 0): 2 * s * a.real})
    p = ladder_operator(spec, {(1, 0): 1j * s, (0, 1): -1j * s, (0, 0): 2 * s * a.imag})
    return q, p


def intensity_profile(x_op: OperatorMatrix, x_eq: float) -> OperatorMatrix:
    """Quartic optical intensity profile f(x) = ((x/x_eq)^2 - 1)^2."""
    if x_eq <= 0:
        raise ValueError("x_eq must be positive")
    m = (x_op.mat / x_eq) @ (x_op.mat / x_eq) - np.eye(x_op.dim)
    return OperatorMatrix(x_op.basis, m @ m)


def even_projection(full_dim: int) -> np.ndarray:
    """Indices of the even-Fock subspace inside a full Fock basis."""
    if full_dim < 2:
        raise ValueError("full_dim must be >= 2")
    return np.arange(0, full_dim, 2)


def restrict(mat: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Restrict an operator to a subspace: O_sub = P^T O P with P column-selecting."""
    return mat[np.ix_(idx, idx)]


def displaced_rebase(op: OperatorMatrix, alpha: complex) -> OperatorMatrix:
    """Rebase a cavity operator to the number basis displaced by alpha.

    Returns D^dag(alpha) op D(alpha).  Implemented through the exact ladder
    substitution a -> a + alpha, adag -> adag + conj(alpha) on the operator's
    normal-ordered polynomial form, which keeps the result exact at the
    truncation (no expm of a truncated generator is ever taken).
    """
    if op.ladder_poly is None:
        raise ValueError("displaced_rebase needs an operator with ladder-polynomial provenance")
    alpha = complex(alpha)
    new_poly: dict[tuple[int, int], complex] = {}
    from math import comb

    for (k, l), c in op.ladder_poly.items():
        # (adag + conj(alpha))^k (a + alpha)^l, already normal ordered
        for i in range(k + 1):
            for j in range(l + 1):
                coeff = (
                    c
                    * comb(k, i)
                    * np.conj(alpha) ** (k - i)
                    * comb(l, j)
                    * alpha ** (l - j)
                )
                if coeff != 0:
                    new_poly[(i, j)] = new_poly.get((i, j), 0) + coeff
    base = op.basis if isinstance(op.basis, BasisSpec) else op.basis[0]
    spec = BasisSpec("displaced-fock", base.dim, alpha)
    out = ladder_operator(spec, new_poly)
    return out


def tensor(op_a: OperatorMatrix, op_b: OperatorMatrix) -> OperatorMatrix:
    """Kronecker product with the cavity as the first factor (fixed convention)."""
    return OperatorMatrix((op_a.basis, op_b.basis), np.kron(op_a.mat, op_b.mat))


def motional_even_operators(n_even: int, x_eq: float, buffer: int = 8) -> dict[str, np.ndarray]:
    """Polynomial motional operators restricted to the even-Fock subspace.

    x^2, x^4, p^2 and f(x) mix Fock levels by up to +-4, so they are built at
    the buffered full cutoff 2*n_even + buffer and only then restricted to the
    even indices {0, 2, ..., 2(n_even-1)}; the retained block is then free of
    truncation edge corruption.
    """
    if buffer < 4:
        raise ValueError("buffer must be >= 4 (powers of x mix Fock levels +-4)")
    full_dim = 2 * n_even + buffer
    spec = BasisSpec("motional-fock", full_dim)
    q, p = quadratures(spec)
    x2 = q.mat @ q.mat
    x4 = x2 @ x2
    p2 = p.mat @ p.mat
    f = intensity_profile(q, x_eq).mat
    idx = even_projection(full_dim)[:n_even]
    return {
        "x2": restrict(x2, idx),
        "x4": restrict(x4, idx),
        "p2": restrict(p2, idx),
        "f": restrict(f, idx),
        "fock_numbers": 2 * np.arange(n_even),
    }
