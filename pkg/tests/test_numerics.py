import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from povmqfi.errors import DimensionMismatch, NotHermitian, NotIsometry, NotPsd
from povmqfi.instances import counterexample_y_reference
from povmqfi.numerics import (
    DEFAULT_TOL,
    Tolerances,
    comm_norm,
    complete_to_unitary,
    eigh,
    haar_unitary,
    psd_sqrt,
    random_hermitian,
    unitarity_residual,
)


def test_default_tolerances():
    t = DEFAULT_TOL
    assert (t.herm, t.psd, t.recon, t.ortho, t.zero_eig, t.commute) == (1e-10, 1e-10, 1e-9, 1e-9, 1e-12, 1e-8)
    assert t.with_overrides(commute=1e-6, herm=None).commute == 1e-6
    with pytest.raises(ValueError):
        Tolerances(herm=0.0)


def test_eigh_identity():
    w, _ = eigh(np.eye(2))
    assert np.allclose(w, [1, 1])


def test_eigh_diagonal_descending():
    w, v = eigh(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [3, 2, 1])
    assert np.allclose(np.abs(v), np.eye(3)[:, [0, 2, 1]])


def test_eigh_pauli_x():
    w, v = eigh(np.array([[0, 1], [1, 0]]))
    assert np.allclose(w, [1, -1])
    assert np.isclose(abs(np.vdot(v[:, 0], [1, 1])) / np.sqrt(2), 1)
    assert np.isclose(abs(np.vdot(v[:, 1], [1, -1])) / np.sqrt(2), 1)


def test_eigh_phase_convention_and_determinism(rng):
    H = random_hermitian(5, rng)
    w1, v1 = eigh(H)
    w2, v2 = eigh(H.copy())
    assert np.array_equal(w1, w2) and np.array_equal(v1, v2)
    pivots = v1[np.argmax(np.abs(v1), axis=0), np.arange(5)]
    assert np.allclose(pivots.imag, 0) and np.all(pivots.real > 0)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        eigh(np.array([[0, 1], [0, 0]]))


def test_eigh_random_reconstruction():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        d = int(rng.integers(1, 9))
        H = random_hermitian(d, rng)
        spec = eigh(H)
        w, V = spec
        assert np.all(np.diff(w) <= 0)
        assert np.linalg.norm(spec.reconstruct() - H) <= 1e-9 * (1 + np.linalg.norm(H))
        assert np.max(np.abs(V.conj().T @ V - np.eye(d))) <= 1e-9


@pytest.mark.parametrize(
    "M, root",
    [
        (np.eye(3) / 2, np.eye(3) / np.sqrt(2)),
        (np.diag([4.0, 0.0]), np.diag([2.0, 0.0])),
        (np.full((2, 2), 0.5), np.full((2, 2), 0.5)),
    ],
)
def test_psd_sqrt_examples(M, root):
    assert np.allclose(psd_sqrt(M), root, atol=1e-12)


def test_psd_sqrt_clips_tiny_negative():
    R = psd_sqrt(np.diag([1.0, -1e-12]))
    assert np.allclose(R, np.diag([1.0, 0.0]))


def test_psd_sqrt_rejects_negative():
    with pytest.raises(NotPsd):
        psd_sqrt(np.diag([1.0, -0.1]))


@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 8))
@settings(max_examples=100, deadline=None)
def test_psd_sqrt_of_square(seed, d):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    M = X @ X.conj().T
    R = psd_sqrt(M)
    assert np.linalg.norm(R @ R - M) <= 1e-9 * (1 + np.linalg.norm(M))
    assert np.linalg.eigvalsh(R).min() >= -1e-10
    # square then root returns the original PSD matrix
    assert np.linalg.norm(psd_sqrt(R @ R) - R) <= 1e-9 * (1 + np.linalg.norm(R))


def test_complete_trivial():
    assert np.allclose(complete_to_unitary([np.eye(3)]), np.eye(3))


def test_complete_two_halves():
    V = complete_to_unitary([np.eye(2) / np.sqrt(2), np.eye(2) / np.sqrt(2)])
    assert unitarity_residual(V) <= 1e-9
    assert np.allclose(V[:2, :2], np.eye(2) / np.sqrt(2))
    assert np.allclose(V[2:, :2], np.eye(2) / np.sqrt(2))
    # Gram-Schmidt over e_0, e_1, ... yields this completion
    assert np.allclose(V[:2, 2:], np.eye(2) / np.sqrt(2))
    assert np.allclose(V[2:, 2:], -np.eye(2) / np.sqrt(2))


def test_complete_rejects_non_isometry():
    with pytest.raises(NotIsometry):
        complete_to_unitary([np.eye(2), np.eye(2)])


def test_complete_random_isometries():
    rng = np.random.default_rng(1)
    for _ in range(200):
        d, n = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        W = haar_unitary(n * d, rng)[:, :d]
        V = complete_to_unitary(np.split(W, n, axis=0))
        assert unitarity_residual(V) <= 1e-9
        assert np.allclose(V[:, :d], W)
        assert np.array_equal(V, complete_to_unitary(np.split(W, n, axis=0)))


def test_comm_norm_basic(rng):
    A = random_hermitian(3, rng)
    assert comm_norm(A, A) == 0
    assert comm_norm(np.diag([1, 2]), np.diag([3, 4])) == 0
    with pytest.raises(DimensionMismatch):
        comm_norm(np.eye(2), np.eye(3))


def test_comm_norm_printed_y_matrices():
    # hand product: [Y1, Y2] = diag(w* - w, w - w*, 0) / 9, |w - w*| = sqrt(3)
    Y1, Y2, _ = counterexample_y_reference()
    assert np.isclose(comm_norm(Y1, Y2), np.sqrt(6) / 9, atol=1e-14)


def test_comm_norm_symmetry_and_unitary_invariance():
    rng = np.random.default_rng(2)
    for _ in range(200):
        d = int(rng.integers(2, 7))
        A, B = random_hermitian(d, rng), random_hermitian(d, rng)
        U = haar_unitary(d, rng)
        c = comm_norm(A, B)
        assert np.isclose(c, comm_norm(B, A), rtol=0, atol=1e-10)
        assert abs(comm_norm(U @ A @ U.conj().T, U @ B @ U.conj().T) - c) <= 1e-10 * (1 + c)
