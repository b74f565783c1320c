"""Basis and operator construction checks."""

import numpy as np
import pytest

from ioncavity import hilbert
from ioncavity.hilbert import BasisSpec


def test_basis_spec_validation():
    with pytest.raises(ValueError):
        BasisSpec("weird-basis", 4)
    with pytest.raises(ValueError):
        BasisSpec("cavity-fock", 0)
    with pytest.raises(ValueError):
        BasisSpec("cavity-fock", 4, 1.0 + 0j)
    BasisSpec("displaced-fock", 4, 1.0 + 2j)  # allowed


def test_annihilation_dim2():
    a = hilbert.annihilation(BasisSpec("cavity-fock", 2))
    assert np.allclose(a.mat, [[0, 1], [0, 0]])


def test_annihilation_entries():
    a = hilbert.annihilation(BasisSpec("cavity-fock", 3))
    assert np.isclose(a.mat[1, 2], np.sqrt(2))
    n = (a.dagger().mat @ a.mat).diagonal().real
    assert np.allclose(n, [0, 1, 2])


def test_number_operator_diagonal():
    n = hilbert.number_operator(BasisSpec("cavity-fock", 6))
    assert np.allclose(n.mat, np.diag(np.arange(6)))


def test_quadratures_dim2():
    q, p = hilbert.quadratures(BasisSpec("cavity-fock", 2))
    s = 1 / np.sqrt(2)
    assert np.allclose(q.mat, [[0, s], [s, 0]])
    assert q.is_hermitian() and p.is_hermitian()


def test_canonical_commutator_interior():
    q, p = hilbert.quadratures(BasisSpec("motional-fock", 12))
    comm = q.mat @ p.mat - p.mat @ q.mat
    # truncation corrupts only the last row/column
    assert np.allclose(comm[:-1, :-1], 1j * np.eye(11))


def test_ground_state_position_variance():
    q, _ = hilbert.quadratures(BasisSpec("motional-fock", 8))
    assert np.isclose((q.mat @ q.mat)[0, 0].real, 0.5)


def test_intensity_profile_scalar_limits():
    # 1x1 "operator" with eigenvalue x probes the classical profile f(x)
    for x, expect in [(0.0, 1.0), (3.0, 0.0), (-3.0, 0.0)]:
        op = hilbert.OperatorMatrix(BasisSpec("motional-fock", 1), np.array([[x + 0j]]))
        f = hilbert.intensity_profile(op, 3.0)
        assert np.isclose(f.mat[0, 0].real, expect)


def test_intensity_profile_rejects_bad_xeq():
    q, _ = hilbert.quadratures(BasisSpec("motional-fock", 4))
    with pytest.raises(ValueError):
        hilbert.intensity_profile(q, 0.0)
    with pytest.raises(ValueError):
        hilbert.intensity_profile(q, -1.0)


def test_intensity_profile_hermitian():
    q, _ = hilbert.quadratures(BasisSpec("motional-fock", 10))
    f = hilbert.intensity_profile(q, 5.0)
    assert f.is_hermitian()


def test_even_projection_indices():
    assert np.array_equal(hilbert.even_projection(6), [0, 2, 4])


def test_even_restriction_of_number():
    n = hilbert.number_operator(BasisSpec("motional-fock", 6))
    idx = hilbert.even_projection(6)
    sub = hilbert.restrict(n.mat, idx)
    assert np.allclose(sub, np.diag([0, 2, 4]))


def test_even_restriction_kills_position():
    q, _ = hilbert.quadratures(BasisSpec("motional-fock", 8))
    idx = hilbert.even_projection(8)
    assert np.allclose(hilbert.restrict(q.mat, idx), 0.0)


def test_displaced_rebase_annihilation():
    a = hilbert.annihilation(BasisSpec("cavity-fock", 5))
    alpha = 0.7 - 0.3j
    shifted = hilbert.displaced_rebase(a, alpha)
    assert np.allclose(shifted.mat, a.mat + alpha * np.eye(5))


def test_displaced_rebase_number():
    spec = BasisSpec("cavity-fock", 5)
    n = hilbert.number_operator(spec)
    a = hilbert.annihilation(spec)
    alpha = 1.1 + 0.4j
    shifted = hilbert.displaced_rebase(n, alpha)
    expect = (
        n.mat
        + alpha * a.dagger().mat
        + np.conj(alpha) * a.mat
        + abs(alpha) ** 2 * np.eye(5)
    )
    assert np.allclose(shifted.mat, expect)


def test_displaced_rebase_zero_is_identity():
    n = hilbert.number_operator(BasisSpec("cavity-fock", 4))
    out = hilbert.displaced_rebase(n, 0.0)
    assert np.allclose(out.mat, n.mat)


def test_displaced_rebase_needs_provenance():
    op = hilbert.OperatorMatrix(BasisSpec("cavity-fock", 3), np.eye(3, dtype=complex))
    with pytest.raises(ValueError):
        hilbert.displaced_rebase(op, 1.0)


def test_displaced_commutator_exact():
    spec = BasisSpec("displaced-fock", 6, 0.9 + 0.2j)
    a = hilbert.annihilation(spec)
    ad = a.dagger()
    comm = a.mat @ ad.mat - ad.mat @ a.mat
    # the alpha*I shift drops out of the commutator identically
    a0 = hilbert.annihilation(BasisSpec("cavity-fock", 6))
    comm0 = a0.mat @ a0.dagger().mat - a0.dagger().mat @ a0.mat
    assert np.max(np.abs(comm - comm0)) < 1e-14


def test_tensor_identity_and_ordering():
    i2 = hilbert.OperatorMatrix(BasisSpec("cavity-fock", 2), np.eye(2, dtype=complex))
    i3 = hilbert.OperatorMatrix(BasisSpec("motional-fock", 3), np.eye(3, dtype=complex))
    assert np.allclose(hilbert.tensor(i2, i3).mat, np.eye(6))

    a = hilbert.annihilation(BasisSpec("cavity-fock", 3))
    q, _ = hilbert.quadratures(BasisSpec("motional-fock", 3))
    left = hilbert.tensor(a, i3).mat @ hilbert.tensor(
        hilbert.OperatorMatrix(BasisSpec("cavity-fock", 3), np.eye(3, dtype=complex)), q
    ).mat
    assert np.allclose(left, hilbert.tensor(a, q).mat)


def test_tensor_trace_multiplicative():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    oa = hilbert.OperatorMatrix(BasisSpec("cavity-fock", 3), a)
    ob = hilbert.OperatorMatrix(BasisSpec("motional-fock", 4), b)
    assert np.isclose(np.trace(hilbert.tensor(oa, ob).mat), np.trace(a) * np.trace(b))


def test_buffered_even_operators_match_larger_build():
    # build at a much larger cutoff and compare the retained block
    n_even = 8
    small = hilbert.motional_even_operators(n_even, 5.0, buffer=8)
    big = hilbert.motional_even_operators(n_even + 6, 5.0, buffer=8)
    for key in ("x2", "x4", "p2", "f"):
        assert np.max(np.abs(small[key] - big[key][:n_even, :n_even])) < 1e-10


def test_even_operators_fock_numbers_and_buffer_guard():
    mot = hilbert.motional_even_operators(4, 5.0)
    assert np.array_equal(mot["fock_numbers"], [0, 2, 4, 6])
    with pytest.raises(ValueError):
        hilbert.motional_even_operators(4, 5.0, buffer=2)


def test_even_x2_diagonal():
    mot = hilbert.motional_even_operators(5, 5.0)
    # <2k|x^2|2k> = 2k + 1/2
    assert np.allclose(np.diag(mot["x2"]).real, 2 * np.arange(5) + 0.5)


def test_constructed_hermitian_operators():
    mot = hilbert.motional_even_operators(10, 5.0)
    for key in ("x2", "x4", "p2", "f"):
        m = mot[key]
        assert np.max(np.abs(m - m.conj().T)) < 1e-12
