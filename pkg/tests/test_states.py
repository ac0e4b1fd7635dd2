import numpy as np
import pytest

from povmqfi.errors import BadRank, CompletenessViolation, NotHermitian, NotPsd, TraceNotOne
from povmqfi.states import (
    BasisMeasurement,
    DensityMatrix,
    Povm,
    ProjectiveMeasurement,
    block_dephase,
    computational_basis,
    incoherence_residual,
    random_block_incoherent_state,
    random_povm,
    random_projective,
    random_state,
    validate_povm,
    validate_state,
)

from conftest import PLUS


def test_validate_maximally_mixed():
    rho = validate_state(np.eye(2) / 2)
    assert np.allclose(rho.eigenvalues, [0.5, 0.5])


def test_validate_pure():
    rho = validate_state(np.outer(PLUS, PLUS))
    assert np.allclose(rho.eigenvalues, [1, 0])


def test_validate_trace():
    with pytest.raises(TraceNotOne) as info:
        validate_state(np.diag([0.6, 0.6]))
    assert np.isclose(info.value.residual, 0.2)


def test_validate_rejects_bad_states():
    with pytest.raises(NotPsd):
        validate_state(np.diag([1.5, -0.5]))
    with pytest.raises(NotHermitian):
        validate_state(np.array([[0.5, 0.3], [0.0, 0.5]]))


def test_from_spectrum_keeps_frame(counterexample):
    assert np.allclose(counterexample.eigenvalues, [0.5, 0.5, 0])
    assert np.allclose(counterexample.eigenvectors[:, 0], np.ones(3) / np.sqrt(3))
    assert np.isclose(np.trace(counterexample.matrix).real, 1)


def test_validate_povm_kinds():
    B = validate_povm([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    assert isinstance(B, BasisMeasurement) and B.block_dims == (1, 1)
    E = validate_povm([np.eye(2) / 2, np.eye(2) / 2])
    assert type(E) is Povm and not E.is_projective
    P = validate_povm([np.diag([1.0, 1.0, 0.0]), np.diag([0.0, 0.0, 1.0])])
    assert type(P) is ProjectiveMeasurement and P.block_dims == (2, 1)
    with pytest.raises(CompletenessViolation):
        validate_povm([np.eye(2) / 2, np.eye(2) / 3])
    with pytest.raises(NotPsd):
        validate_povm([np.diag([1.5, 1.0]), np.diag([-0.5, 0.0])])


def test_incoherence_residual_examples(plus_state, qubit_basis, noisy_povm):
    assert incoherence_residual(validate_state(np.diag([0.3, 0.7])), qubit_basis) == 0
    assert np.isclose(incoherence_residual(plus_state, qubit_basis), 0.5)
    rho = random_state(2, seed=3)
    assert np.isclose(incoherence_residual(rho, noisy_povm), np.linalg.norm(rho.matrix) / 4)
    assert incoherence_residual(rho, validate_povm([np.eye(2)])) == 0


def test_random_state_examples():
    rho = random_state(2, rank=1, seed=7)
    assert np.allclose(rho.eigenvalues, [1, 0], atol=1e-12)
    rho = random_state(3, rank=3, seed=1)
    assert np.isclose(np.trace(rho.matrix).real, 1) and rho.eigenvalues[-1] > 0
    assert np.array_equal(random_state(4, 2, seed=9).matrix, random_state(4, 2, seed=9).matrix)
    with pytest.raises(BadRank):
        random_state(2, rank=3, seed=0)


def test_random_povm_examples():
    assert np.allclose(random_povm(2, 1, seed=0).elements[0], np.eye(2))
    E = random_povm(2, 3, seed=5)
    assert np.linalg.norm(sum(E.elements) - np.eye(2)) <= 1e-9
    F = random_povm(2, 3, seed=5)
    assert all(np.array_equal(a, b) for a, b in zip(E.elements, F.elements))


def test_random_povm_always_validates():
    for seed in range(500):
        rng = np.random.default_rng(seed)
        d, n = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        E = random_povm(d, n, seed=rng)
        validate_povm(E.elements)


def test_block_incoherent_examples():
    rho = random_block_incoherent_state(computational_basis(3), seed=4)
    assert np.allclose(rho.matrix, np.diag(np.diag(rho.matrix)), atol=1e-14)
    single = validate_povm([np.eye(3)])
    assert incoherence_residual(random_block_incoherent_state(single, seed=4), single) == 0
    for seed in range(50):
        P = random_projective(5, seed=seed)
        assert incoherence_residual(random_block_incoherent_state(P, seed=seed), P) <= 1e-12


def test_residual_zero_iff_dephasing_fixed_point():
    rng = np.random.default_rng(11)
    for _ in range(100):
        d = int(rng.integers(2, 6))
        P = random_projective(d, seed=rng)
        inc = random_block_incoherent_state(P, seed=rng)
        assert incoherence_residual(inc, P) <= 1e-12
        assert np.linalg.norm(block_dephase(inc, P) - inc.matrix) <= 1e-10
        rho = random_state(d, seed=rng)
        if len(P) > 1:
            assert incoherence_residual(rho, P) > 1e-12
            assert np.linalg.norm(block_dephase(rho, P) - rho.matrix) > 1e-10


def test_residual_relabeling_invariant():
    rng = np.random.default_rng(12)
    for _ in range(50):
        E = random_povm(3, 4, seed=rng)
        rho = random_state(3, seed=rng)
        perm = rng.permutation(4)
        shuffled = Povm(tuple(E.elements[i] for i in perm))
        assert np.isclose(incoherence_residual(rho, E), incoherence_residual(rho, shuffled), rtol=0, atol=1e-15)


def test_pure_constructor_normalizes():
    rho = DensityMatrix.pure([3.0, 4.0])
    assert np.isclose(rho.matrix[0, 0].real, 0.36)
