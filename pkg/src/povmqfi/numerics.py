"""Dense complex linear algebra used by every other module.

All routines are pure functions of their inputs.  Tolerances are grouped in
:class:`Tolerances`; every public function takes an optional ``tol`` argument
and falls back to :data:`DEFAULT_TOL`.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotIsometry, NotPsd, NumericalFailure


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-10
    psd: float = 1e-10
    recon: float = 1e-9
    ortho: float = 1e-9
    zero_eig: float = 1e-12  # relative to the largest eigenvalue
    commute: float = 1e-8

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"tolerance {f.name} must be positive, got {value!r}")

    def with_overrides(self, **kwargs) -> "Tolerances":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order and matching eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T

    def __iter__(self):
        yield self.eigenvalues
        yield self.eigenvectors


def as_matrix(M) -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def as_square(M) -> np.ndarray:
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    return A


def hermiticity_residual(M) -> float:
    A = as_square(M)
    return float(np.linalg.norm(A - A.conj().T))


def check_hermitian(M, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Return the Hermitian part of ``M`` after checking ``M`` is Hermitian."""
    A = as_square(M)
    res = hermiticity_residual(A)
    if res > tol.herm * (1.0 + np.linalg.norm(A)):
        raise NotHermitian(f"matrix is not Hermitian: ||M - M^dag||_F = {res:.3e}", res)
    return 0.5 * (A + A.conj().T)


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude component of each column made real positive
    V = np.array(vectors, dtype=complex, copy=True)
    idx = np.argmax(np.abs(V), axis=0)
    pivots = V[idx, np.arange(V.shape[1])]
    mags = np.abs(pivots)
    phases = np.where(mags > 0, pivots / np.where(mags > 0, mags, 1.0), 1.0)
    return V / phases


def eigh(M, tol: Tolerances = DEFAULT_TOL) -> Spectrum:
    """Hermitian eigendecomposition, eigenvalues descending."""
    H = check_hermitian(M, tol)
    try:
        w, v = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver did not converge: {exc}") from exc
    w = w[::-1].copy()
    v = fix_phases(v[:, ::-1])
    return Spectrum(w, v)


def psd_sqrt(M, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix."""
    w, v = eigh(M, tol)
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    if w.size and w[-1] < -tol.psd * scale:
        raise NotPsd(f"matrix has negative eigenvalue {w[-1]:.3e}", float(-w[-1]))
    root = np.sqrt(np.clip(w, 0.0, None))
    R = (v * root) @ v.conj().T
    return 0.5 * (R + R.conj().T)


def complete_to_unitary(first_block_column: Sequence, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Extend a block column isometry to a full unitary.

    ``first_block_column`` holds the blocks ``V_j1`` (each ``d' x d``) stacked
    top to bottom.  The result is an ``n d' x n d'`` unitary in block layout
    (row block ``j`` corresponds to register index ``j``) whose first ``d``
    columns are the stacked input.  The remaining columns come from
    Gram-Schmidt over the canonical basis vectors taken in index order.
    """
    blocks = [as_matrix(B) for B in first_block_column]
    if not blocks:
        raise DimensionMismatch("empty block column")
    rows, cols = blocks[0].shape
    if any(B.shape != (rows, cols) for B in blocks):
        raise DimensionMismatch("blocks of the column must share a shape")
    W = np.vstack(blocks)
    N, d = W.shape
    if d > N:
        raise DimensionMismatch(f"cannot complete {N}x{d} column block to a unitary")
    res = float(np.linalg.norm(W.conj().T @ W - np.eye(d)))
    if res > tol.recon:
        raise NotIsometry(f"block column is not an isometry: ||W^dag W - I||_F = {res:.3e}", res)

    Q = np.zeros((N, N), dtype=complex)
    Q[:, :d] = W
    k = d
    for i in range(N):
        if k == N:
            break
        v = np.zeros(N, dtype=complex)
        v[i] = 1.0
        for _ in range(2):
            v = v - Q[:, :k] @ (Q[:, :k].conj().T @ v)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            Q[:, k] = v / norm
            k += 1
    if k != N:
        raise NumericalFailure("unitary completion failed to span the complement")
    return Q


def unitarity_residual(U) -> float:
    U = as_square(U)
    eye = np.eye(U.shape[0])
    return float(max(np.linalg.norm(U.conj().T @ U - eye), np.linalg.norm(U @ U.conj().T - eye)))


def comm_norm(A, B) -> float:
    """Frobenius norm of the commutator ``AB - BA``."""
    A = as_square(A)
    B = as_square(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes differ: {A.shape} vs {B.shape}")
    return float(np.linalg.norm(A @ B - B @ A))


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    diag = np.diagonal(R)
    return Q * (diag / np.abs(diag))


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (Z + Z.conj().T)
