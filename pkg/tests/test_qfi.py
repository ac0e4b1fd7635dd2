import numpy as np
import pytest
from scipy.linalg import solve_sylvester

from povmqfi.errors import DimensionMismatch, NotNormalized
from povmqfi.numerics import haar_unitary, random_hermitian
from povmqfi.qfi import pure_qfi, qfi, qfi_via_z, z_matrix
from povmqfi.states import DensityMatrix, random_state, validate_state

from conftest import PLUS

P0 = np.diag([1.0, 0.0])


def sld_qfi(rho, A):
    """QFI from the symmetric logarithmic derivative of a full-rank state.

    Solves (rho L + L rho) / 2 = -i [A, rho] and returns tr(rho L^2).
    """
    drho = -1j * (A @ rho - rho @ A)
    L = solve_sylvester(rho, rho, 2 * drho)
    return float(np.trace(rho @ L @ L).real)


def test_maximally_mixed_has_zero_qfi(rng):
    rho = validate_state(np.eye(4) / 4)
    assert qfi(rho, random_hermitian(4, rng)) == 0


def test_plus_state(plus_state):
    assert np.isclose(qfi(plus_state, P0), 1.0, atol=1e-12)
    assert np.isclose(pure_qfi(PLUS, P0), 1.0, atol=1e-12)
    assert np.isclose(qfi_via_z(plus_state, P0), 1.0, atol=1e-12)


def test_counterexample_element_qfi(counterexample):
    for j in range(3):
        A = np.diag(np.eye(3)[j])
        assert np.isclose(qfi(counterexample, A), 4 / 9, atol=1e-12)


def test_pure_qfi_examples():
    assert pure_qfi([1.0, 0.0], P0) == 0
    psi = np.ones(3) / np.sqrt(3)
    assert np.isclose(pure_qfi(psi, np.diag([1.0, 0, 0])), 8 / 9, atol=1e-14)
    with pytest.raises(NotNormalized):
        pure_qfi([1.0, 1.0], P0)
    with pytest.raises(DimensionMismatch):
        pure_qfi([1.0, 0.0, 0.0], P0)


def test_qfi_dimension_mismatch(plus_state):
    with pytest.raises(DimensionMismatch):
        qfi(plus_state, np.eye(3))


def test_z_matrix_examples(rng):
    psi = haar_unitary(3, rng)[:, 0]
    A = random_hermitian(3, rng)
    rho = DensityMatrix.pure(psi)
    expect = np.vdot(psi, A @ psi).real * np.outer(psi, psi.conj())
    assert np.allclose(z_matrix(rho, A), expect, atol=1e-12)

    sx = np.array([[0, 1], [1, 0]])
    assert np.allclose(z_matrix(validate_state(np.eye(2) / 2), sx), sx / np.sqrt(2))

    rho = random_state(3, seed=4)
    Z = z_matrix(rho, np.eye(3))
    assert np.allclose(Z, (rho.eigenvectors * np.sqrt(rho.eigenvalues)) @ rho.eigenvectors.conj().T)
    assert np.isclose(np.trace(Z @ Z).real, 1)
    assert qfi(rho, np.eye(3)) <= 1e-14


def test_against_sld_oracle():
    rng = np.random.default_rng(5)
    for _ in range(100):
        d = int(rng.integers(2, 6))
        rho = random_state(d, seed=rng)
        A = random_hermitian(d, rng)
        ref = sld_qfi(rho.matrix, A)
        assert abs(qfi(rho, A) - ref) <= 1e-8 * (1 + ref)


def test_unitary_invariance():
    rng = np.random.default_rng(6)
    for _ in range(200):
        d = int(rng.integers(2, 7))
        rho = random_state(d, int(rng.integers(1, d + 1)), seed=rng)
        A = random_hermitian(d, rng)
        U = haar_unitary(d, rng)
        moved = validate_state(U @ rho.matrix @ U.conj().T)
        F = qfi(rho, A)
        assert abs(qfi(moved, U @ A @ U.conj().T) - F) <= 1e-9 * max(1.0, F)


def test_convexity():
    rng = np.random.default_rng(7)
    for _ in range(200):
        d = int(rng.integers(2, 7))
        r1 = random_state(d, int(rng.integers(1, d + 1)), seed=rng)
        r2 = random_state(d, int(rng.integers(1, d + 1)), seed=rng)
        A = random_hermitian(d, rng)
        p = rng.uniform()
        mix = validate_state(p * r1.matrix + (1 - p) * r2.matrix)
        assert qfi(mix, A) <= p * qfi(r1, A) + (1 - p) * qfi(r2, A) + 1e-9


def test_pure_state_consistency():
    rng = np.random.default_rng(8)
    for _ in range(200):
        d = int(rng.integers(2, 7))
        psi = haar_unitary(d, rng)[:, 0]
        A = random_hermitian(d, rng)
        assert abs(qfi(DensityMatrix.pure(psi), A) - pure_qfi(psi, A)) <= 1e-10 * max(1.0, pure_qfi(psi, A))


def test_z_bridge_full_and_deficient_rank():
    rng = np.random.default_rng(9)
    for _ in range(200):
        d = int(rng.integers(2, 7))
        rho = random_state(d, int(rng.integers(1, d + 1)), seed=rng)
        A = random_hermitian(d, rng)
        F = qfi(rho, A)
        assert abs(qfi_via_z(rho, A) - F) <= 1e-9 * max(1.0, F)
        Z = z_matrix(rho, A)
        assert np.linalg.norm(Z - Z.conj().T) <= 1e-10


def test_degenerate_perturbation():
    rng = np.random.default_rng(10)
    for _ in range(50):
        U = haar_unitary(4, rng)
        A = random_hermitian(4, rng)
        lam = np.array([0.4, 0.4, 0.2, 0.0])
        base = validate_state((U * lam) @ U.conj().T)
        for eps in (1e-13, -1e-13):
            shifted = lam + np.array([eps, -eps, 0, 0])
            pert = validate_state((U * shifted) @ U.conj().T)
            assert abs(qfi(pert, A) - qfi(base, A)) <= 1e-8
